"""Superderivations of the free Grassmann algebra.

A derivation is stored by the images of the generators and extended by the
graded Leibniz rule:

    D(a) = sum_i a_i * da/dx_i + sum_j b_j * da/dt_j

where d/dt_j acts from the left, picking up (-1)^(r-1) when t_j sits in
position r of the normal-ordered monomial.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .coeff import Polynomial, Rational, as_fraction, partial_derivative
from .errors import ArgumentError, ParityError
from .grassmann import (
    AlgebraSignature,
    GrassmannElement,
    gmul,
    jk_test,
    monomial_basis,
    sort_monomials,
    weight,
)
from .linalg import RowReducer, nullspace
from .sampling import random_element


class SuperDerivation:
    """Homogeneous superderivation given by generator images.

    ``even_coeffs[i]`` is the coefficient of d/dx_{i+1} and ``odd_coeffs[j]``
    the coefficient of d/dt_{j+1}.
    """

    __slots__ = ("signature", "parity", "even_coeffs", "odd_coeffs")

    def __init__(
        self,
        signature: AlgebraSignature,
        parity: int,
        even_coeffs: Sequence[GrassmannElement] | None = None,
        odd_coeffs: Sequence[GrassmannElement] | None = None,
    ):
        if parity not in (0, 1):
            raise ArgumentError("parity must be 0 or 1")
        zero = GrassmannElement.zero(signature)
        even = tuple(even_coeffs) if even_coeffs is not None else (zero,) * signature.p
        odd = tuple(odd_coeffs) if odd_coeffs is not None else (zero,) * signature.q
        if len(even) != signature.p or len(odd) != signature.q:
            raise ArgumentError("coefficient lists do not match the signature")
        for c in even + odd:
            if c.signature != signature:
                raise ArgumentError("derivation coefficient lives in another algebra")
        for i, c in enumerate(even):
            if c and c.parity() != parity:
                raise ParityError(
                    f"coefficient of d/d{signature.even_names[i]} must have parity {parity}")
        for j, c in enumerate(odd):
            if c and c.parity() != 1 - parity:
                raise ParityError(
                    f"coefficient of d/d{signature.odd_names[j]} must have parity {1 - parity}")
        self.signature = signature
        self.parity = parity
        self.even_coeffs = even
        self.odd_coeffs = odd

    @classmethod
    def zero(cls, sig: AlgebraSignature, parity: int = 0) -> "SuperDerivation":
        return cls(sig, parity)

    @classmethod
    def partial_x(cls, sig: AlgebraSignature, i: int) -> "SuperDerivation":
        if not 1 <= i <= sig.p:
            raise ArgumentError(f"even index {i} out of range")
        even = [GrassmannElement.zero(sig)] * sig.p
        even[i - 1] = GrassmannElement.one(sig)
        return cls(sig, 0, even)

    @classmethod
    def partial_theta(cls, sig: AlgebraSignature, j: int) -> "SuperDerivation":
        if not 1 <= j <= sig.q:
            raise ArgumentError(f"odd index {j} out of range")
        odd = [GrassmannElement.zero(sig)] * sig.q
        odd[j - 1] = GrassmannElement.one(sig)
        return cls(sig, 1, None, odd)

    @classmethod
    def from_images(cls, sig: AlgebraSignature, images: Sequence[GrassmannElement]) -> "SuperDerivation":
        """Build from the images of x1..xp, t1..tq; parity is inferred."""
        images = list(images)
        if len(images) != sig.p + sig.q:
            raise ArgumentError("need one image per generator")
        parity = None
        for k, img in enumerate(images):
            if not img:
                continue
            gen_parity = 0 if k < sig.p else 1
            p = img.parity()
            if p is None:
                raise ParityError("derivation image is not parity-homogeneous")
            if parity is None:
                parity = (p - gen_parity) % 2
            elif parity != (p - gen_parity) % 2:
                raise ParityError("generator images disagree on the derivation parity")
        return cls(sig, parity or 0, images[: sig.p], images[sig.p:])

    # -- linear structure ----------------------------------------------------

    def images(self) -> tuple[GrassmannElement, ...]:
        return self.even_coeffs + self.odd_coeffs

    def is_zero(self) -> bool:
        return not any(self.images())

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _combine(self, other: "SuperDerivation", sign: int) -> "SuperDerivation":
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        if other.signature != self.signature:
            raise ArgumentError("derivations act on different algebras")
        if self.is_zero():
            return other if sign > 0 else -other
        if other.is_zero():
            return self
        if other.parity != self.parity:
            raise ParityError("cannot add derivations of different parity")
        even = [a + b.scale(sign) for a, b in zip(self.even_coeffs, other.even_coeffs)]
        odd = [a + b.scale(sign) for a, b in zip(self.odd_coeffs, other.odd_coeffs)]
        return SuperDerivation(self.signature, self.parity, even, odd)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self) -> "SuperDerivation":
        return self.scale(-1)

    def scale(self, c: Rational) -> "SuperDerivation":
        c = as_fraction(c)
        return SuperDerivation(self.signature, self.parity,
                               [a.scale(c) for a in self.even_coeffs],
                               [b.scale(c) for b in self.odd_coeffs])

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def left_multiply(self, r: GrassmannElement) -> "SuperDerivation":
        """The derivation r*D of parity |r| + |D|."""
        p = r.parity()
        if p is None:
            raise ParityError("module action needs a homogeneous element")
        return SuperDerivation(self.signature, (p + self.parity) % 2,
                               [gmul(r, a) for a in self.even_coeffs],
                               [gmul(r, b) for b in self.odd_coeffs])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        if self.signature != other.signature:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.parity == other.parity and self.images() == other.images()

    def __hash__(self) -> int:
        return hash((self.signature, self.images()))

    def __call__(self, a: GrassmannElement) -> GrassmannElement:
        return derive_apply(self, a)

    def __repr__(self) -> str:
        return f"SuperDerivation({format_derivation(self)!r})"

    def __str__(self) -> str:
        return format_derivation(self)


def d_dx(a: GrassmannElement, i: int) -> GrassmannElement:
    """Coefficientwise partial derivative in x_i."""
    return GrassmannElement(a.signature, {m: partial_derivative(p, i) for m, p in a.items()})


def d_dtheta(a: GrassmannElement, j: int) -> GrassmannElement:
    """Left derivative in t_j."""
    bit = 1 << (j - 1)
    below = bit - 1
    out = {}
    for mask, poly in a.items():
        if mask & bit:
            sign = -1 if (mask & below).bit_count() & 1 else 1
            out[mask ^ bit] = poly if sign > 0 else -poly
    return GrassmannElement._raw(a.signature, out)


def derive_apply(D: SuperDerivation, a: GrassmannElement) -> GrassmannElement:
    if D.signature != a.signature:
        raise ArgumentError("derivation and element belong to different algebras")
    result = GrassmannElement.zero(a.signature)
    for i, c in enumerate(D.even_coeffs, start=1):
        if c:
            da = d_dx(a, i)
            if da:
                result = result + gmul(c, da)
    for j, c in enumerate(D.odd_coeffs, start=1):
        if c:
            da = d_dtheta(a, j)
            if da:
                result = result + gmul(c, da)
    return result


def euler_field(sig: AlgebraSignature) -> SuperDerivation:
    """sum_j t_j d/dt_j."""
    return SuperDerivation(sig, 0, None, [GrassmannElement.theta(sig, j) for j in range(1, sig.q + 1)])


def format_derivation(D: SuperDerivation, unicode: bool = False) -> str:
    sig = D.signature
    names = sig.even_names + sig.odd_names
    parts = []
    for name, c in zip(names, D.images()):
        if not c:
            continue
        if c == 1:
            parts.append(f"d/d{name}")
            continue
        text = c.__str__() if not unicode else _unicode(c)
        if c.num_monomials() == 1 and not text.startswith("-"):
            parts.append(f"{text}*d/d{name}")
        else:
            parts.append(f"({text})*d/d{name}")
    return " + ".join(parts) if parts else "0"


def _unicode(c: GrassmannElement) -> str:
    from .grassmann import format_element
    return format_element(c, unicode=True)


# -- Leibniz checking ----------------------------------------------------------


@dataclass
class RawLinearMap:
    """A homogeneous linear map specified on scalar monomials.

    Used only to feed deliberately broken maps to ``leibniz_check``.  Monomials
    missing from ``table`` go through ``default`` (or map to zero).
    """

    signature: AlgebraSignature
    parity: int
    table: dict = field(default_factory=dict)
    default: Callable[[GrassmannElement], GrassmannElement] | None = None

    @classmethod
    def from_derivation(cls, D: SuperDerivation) -> "RawLinearMap":
        return cls(D.signature, D.parity, {}, D.__call__)

    def mutate(self, exp: Sequence[int], mask: int, delta: GrassmannElement) -> "RawLinearMap":
        """Copy with the image of one monomial shifted by ``delta``."""
        mono = GrassmannElement.monomial(self.signature, exp, mask)
        table = dict(self.table)
        key = (tuple(exp), mask)
        table[key] = self._image(key, mono) + delta
        return RawLinearMap(self.signature, self.parity, table, self.default)

    def _image(self, key, mono: GrassmannElement) -> GrassmannElement:
        if key in self.table:
            return self.table[key]
        if self.default is not None:
            return self.default(mono)
        return GrassmannElement.zero(self.signature)

    def __call__(self, a: GrassmannElement) -> GrassmannElement:
        out = GrassmannElement.zero(self.signature)
        for exp, mask, c in a.monomial_items():
            mono = GrassmannElement.monomial(self.signature, exp, mask)
            out = out + self._image((tuple(exp), mask), mono).scale(c)
        return out


@dataclass
class LeibnizReport:
    passed: bool
    checked: int
    witness: tuple[GrassmannElement, GrassmannElement] | None = None
    lhs: GrassmannElement | None = None
    rhs: GrassmannElement | None = None


def _leibniz_defect(D, parity: int, r: GrassmannElement, s: GrassmannElement):
    lhs = D(gmul(r, s))
    sign = -1 if (parity * r.parity()) & 1 else 1
    rhs = gmul(D(r), s) + gmul(r, D(s)).scale(sign)
    return lhs, rhs


def leibniz_check(D: SuperDerivation | RawLinearMap, trials: int = 500, seed: int = 0,
                  sweep_degree: int = 1) -> LeibnizReport:
    """Test D(rs) = D(r)s + (-1)^{|D||r|} r D(s) on homogeneous pairs.

    A deterministic sweep over pairs of small monomials (polynomial degree
    <= ``sweep_degree``) runs first, then ``trials`` random homogeneous pairs.
    The first counterexample is reported.
    """
    if trials < 1:
        raise ArgumentError("trials must be at least 1")
    sig = D.signature
    parity = D.parity
    basis = sorted(monomial_basis(sig, sweep_degree + sig.q),
                   key=lambda em: (sum(em[0]) > 0, sum(em[0]), weight(em[1]), em[1], em[0]))
    basis = [GrassmannElement.monomial(sig, e, m) for e, m in basis if sum(e) <= sweep_degree]
    checked = 0
    for r in basis:
        for s in basis:
            checked += 1
            lhs, rhs = _leibniz_defect(D, parity, r, s)
            if lhs != rhs:
                return LeibnizReport(False, checked, (r, s), lhs, rhs)
    rng = random.Random(seed)
    for _ in range(trials):
        r = random_element(rng, sig, parity=rng.randint(0, 1), max_terms=3)
        s = random_element(rng, sig, parity=rng.randint(0, 1), max_terms=3)
        checked += 1
        lhs, rhs = _leibniz_defect(D, parity, r, s)
        if lhs != rhs:
            return LeibnizReport(False, checked, (r, s), lhs, rhs)
    return LeibnizReport(True, checked)


# -- Euler field, eigen-structure, adaptedness ---------------------------------


@dataclass
class EigenDecomposition:
    components: dict[int, GrassmannElement]
    decomposable: bool
    residual: GrassmannElement | None = None


def eigen_decompose(a: GrassmannElement, E: SuperDerivation, max_eigenvalue: int | None = None) -> EigenDecomposition:
    """Split ``a`` into eigenvectors of E with eigenvalues 0..max_eigenvalue.

    Uses the Lagrange projectors prod_{j != k} (E - j)/(k - j); the split is
    accepted only if the pieces sum to ``a`` and each satisfies E c = k c.
    """
    if E.parity != 0 and not E.is_zero():
        raise ArgumentError("eigen decomposition needs an even derivation")
    top = a.signature.q if max_eigenvalue is None else max_eigenvalue
    components: dict[int, GrassmannElement] = {}
    total = GrassmannElement.zero(a.signature)
    for k in range(top + 1):
        v = a
        for j in range(top + 1):
            if j == k or not v:
                continue
            v = (derive_apply(E, v) - v.scale(j)).scale(Fraction(1, k - j))
        if v:
            components[k] = v
            total = total + v
    ok = total == a and all(derive_apply(E, c) == c.scale(k) for k, c in components.items())
    if ok:
        return EigenDecomposition(components, True)
    return EigenDecomposition(components, False, a - total)


@dataclass
class AdaptednessReport:
    passed: bool
    max_degree: int
    checked: int
    failing_k: int | None = None
    witness: GrassmannElement | None = None
    image: GrassmannElement | None = None


def adapted_check(E: SuperDerivation, context=None, max_degree: int | None = None) -> AdaptednessReport:
    """Check (E - k) J^k in J^{k+1} for 0 <= k <= q on monomials of degree <= D.

    ``context`` is None for the free algebra or a Presentation, in which case
    membership is tested in the quotient modulo total degree > D.
    """
    if E.parity != 0 and not E.is_zero():
        raise ArgumentError("adaptedness is defined for even derivations only")
    sig = E.signature
    if context is not None:
        from .presentation import FiltrationQuotient
        if context.signature != sig:
            raise ArgumentError("derivation and presentation have different signatures")
        D = context.D if max_degree is None else max_degree
        quotient = FiltrationQuotient(context, D)
    else:
        if max_degree is None:
            raise ArgumentError("the free algebra needs an explicit truncation degree")
        D = max_degree
        quotient = None
    checked = 0
    for k in range(sig.q + 1):
        for exp, mask in sort_monomials(monomial_basis(sig, D, min_weight=k)):
            m = GrassmannElement.monomial(sig, exp, mask)
            image = (derive_apply(E, m) - m.scale(k)).truncate(D)
            checked += 1
            inside = jk_test(image, k + 1) if quotient is None else quotient.contains(image, k + 1)
            if not inside:
                return AdaptednessReport(False, D, checked, k, m, image)
    return AdaptednessReport(True, D, checked)


def filtration_splitting(E: SuperDerivation, k: int, max_degree: int) -> dict[str, int]:
    """Dimensions behind J^k = Ker(E - k) + J^{k+1} in the free algebra, truncated.

    Returns dim J^k, dim Ker(E - k) restricted to J^k, dim J^{k+1} and the
    dimension of the intersection of the kernel with J^{k+1}.
    """
    sig = E.signature
    span_k = sort_monomials(monomial_basis(sig, max_degree, min_weight=k))
    span_k1 = [em for em in span_k if weight(em[1]) >= k + 1]
    col = {em: i for i, em in enumerate(span_k)}
    rows: dict[tuple, dict[int, Fraction]] = {}
    for j, (exp, mask) in enumerate(span_k):
        m = GrassmannElement.monomial(sig, exp, mask)
        image = (derive_apply(E, m) - m.scale(k)).truncate(max_degree)
        for e2, m2, c in image.monomial_items():
            rows.setdefault((tuple(e2), m2), {})[j] = c
    kernel = nullspace(rows.values(), len(span_k))
    red = RowReducer()
    for v in kernel:
        red.insert(v)
    for em in span_k1:
        red.insert({col[em]: Fraction(1)})
    dim_sum = red.rank
    return {
        "J^k": len(span_k),
        "kernel": len(kernel),
        "J^k+1": len(span_k1),
        "intersection": len(kernel) + len(span_k1) - dim_sum,
    }
