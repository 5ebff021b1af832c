"""The free Grassmann algebra C[x1..xp][t1..tq] with sign bookkeeping.

An element is a sparse map from odd-index subsets (bitmasks, bit j-1 for the
generator t_j) to polynomial coefficients.  Monomials are kept in the normal
form t^{i1} ... t^{ik} with i1 < ... < ik.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterator, Mapping, Sequence

from .coeff import (
    Expr,
    Polynomial,
    Rational,
    arity,
    as_fraction,
    default_names,
    format_monomial,
    grlex_key,
    has_atoms,
    jet_expand,
    mul_into,
    multi_indices,
    partial_derivative,
    substitute,
    to_polynomial,
)
from .errors import ArgumentError, ParityError, UnsupportedCenterError

MAX_ODD = 62


@dataclass(frozen=True)
class AlgebraSignature:
    """Dimension p|q plus generator names (defaults x1..xp and t1..tq)."""

    p: int
    q: int
    even_names: tuple[str, ...] = field(default=())
    odd_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ArgumentError("p and q must be non-negative")
        if self.q > MAX_ODD:
            raise ArgumentError(f"at most {MAX_ODD} odd generators are supported")
        if not self.even_names:
            object.__setattr__(self, "even_names", default_names(self.p, "x"))
        if not self.odd_names:
            object.__setattr__(self, "odd_names", default_names(self.q, "t"))
        object.__setattr__(self, "even_names", tuple(self.even_names))
        object.__setattr__(self, "odd_names", tuple(self.odd_names))
        if len(self.even_names) != self.p or len(self.odd_names) != self.q:
            raise ArgumentError("generator name lists do not match p|q")
        names = self.even_names + self.odd_names
        if len(set(names)) != len(names):
            raise ArgumentError("generator names must be pairwise distinct")

    @property
    def generator_names(self) -> tuple[str, ...]:
        return self.even_names + self.odd_names

    def reduced(self) -> "AlgebraSignature":
        return AlgebraSignature(self.p, 0, self.even_names, ())


def mask_indices(mask: int) -> list[int]:
    """1-based indices of the set bits, increasing."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def weight(mask: int) -> int:
    return mask.bit_count()


def product_sign(a: int, b: int) -> int:
    """Sign of t^A t^B = sign * t^(A u B) for disjoint A, B.

    Counts pairs (i, j) in A x B with i > j.
    """
    inversions = 0
    rest = b
    while rest:
        low = rest & -rest
        j = low.bit_length()  # bit position + 1
        inversions += (a >> j).bit_count()
        rest ^= low
    return -1 if inversions & 1 else 1


class GrassmannElement:
    """An element of the free Grassmann algebra over a signature.

    Immutable by convention; arithmetic returns new elements.
    """

    __slots__ = ("signature", "_terms", "_hash")

    def __init__(self, signature: AlgebraSignature, terms: Mapping[int, Polynomial] | None = None):
        self.signature = signature
        clean: dict[int, Polynomial] = {}
        limit = 1 << signature.q
        for mask, poly in (terms or {}).items():
            if not 0 <= mask < limit:
                raise ArgumentError(f"mask {mask:b} does not fit in q={signature.q} bits")
            if poly.nvars != signature.p:
                raise ArgumentError("coefficient lives in the wrong polynomial ring")
            if poly:
                clean[mask] = clean[mask] + poly if mask in clean else poly
                if not clean[mask]:
                    del clean[mask]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, signature: AlgebraSignature, terms: dict[int, Polynomial]) -> "GrassmannElement":
        obj = cls.__new__(cls)
        obj.signature = signature
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, sig: AlgebraSignature) -> "GrassmannElement":
        return cls._raw(sig, {})

    @classmethod
    def scalar(cls, sig: AlgebraSignature, value: Rational) -> "GrassmannElement":
        return cls.from_polynomial(sig, Polynomial.constant(sig.p, value))

    @classmethod
    def one(cls, sig: AlgebraSignature) -> "GrassmannElement":
        return cls.scalar(sig, 1)

    @classmethod
    def from_polynomial(cls, sig: AlgebraSignature, poly: Polynomial, mask: int = 0) -> "GrassmannElement":
        return cls(sig, {mask: poly})

    @classmethod
    def x(cls, sig: AlgebraSignature, i: int) -> "GrassmannElement":
        return cls.from_polynomial(sig, Polynomial.variable(sig.p, i))

    @classmethod
    def theta(cls, sig: AlgebraSignature, j: int) -> "GrassmannElement":
        if not 1 <= j <= sig.q:
            raise ArgumentError(f"odd generator index {j} out of range 1..{sig.q}")
        return cls._raw(sig, {1 << (j - 1): Polynomial.constant(sig.p, 1)})

    @classmethod
    def monomial(cls, sig: AlgebraSignature, exp: Sequence[int], mask: int, coeff: Rational = 1) -> "GrassmannElement":
        return cls(sig, {mask: Polynomial(sig.p, {tuple(exp): coeff})})

    @classmethod
    def generators(cls, sig: AlgebraSignature) -> list["GrassmannElement"]:
        return [cls.x(sig, i) for i in range(1, sig.p + 1)] + [cls.theta(sig, j) for j in range(1, sig.q + 1)]

    # -- views ---------------------------------------------------------------

    @property
    def terms(self) -> dict[int, Polynomial]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, Polynomial]]:
        return iter(self._terms.items())

    def monomial_items(self) -> Iterator[tuple[Sequence[int], int, Fraction]]:
        """Yield (exponent, mask, coefficient) for every scalar monomial."""
        for mask, poly in self._terms.items():
            for exp, c in poly.items():
                yield exp, mask, c

    def coefficient(self, mask: int) -> Polynomial:
        return self._terms.get(mask, Polynomial.zero(self.signature.p))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def num_monomials(self) -> int:
        return sum(len(p) for p in self._terms.values())

    def parity(self) -> int | None:
        """0 or 1 for homogeneous nonzero elements, 0 for zero, None if mixed."""
        parities = {weight(m) & 1 for m in self._terms}
        if not parities:
            return 0
        if len(parities) == 1:
            return parities.pop()
        return None

    def is_homogeneous(self) -> bool:
        return self.parity() is not None

    def is_even(self) -> bool:
        return all(not weight(m) & 1 for m in self._terms)

    def is_odd(self) -> bool:
        return all(weight(m) & 1 for m in self._terms)

    def weights(self) -> set[int]:
        return {weight(m) for m in self._terms}

    def body(self) -> Polynomial:
        """The weight-0 part as a polynomial."""
        return self.coefficient(0)

    def total_degree(self) -> int:
        """Max of polynomial degree + |I| over terms; -1 for zero."""
        return max((p.degree() + weight(m) for m, p in self._terms.items()), default=-1)

    def truncate(self, max_degree: int) -> "GrassmannElement":
        """Drop every scalar monomial of total degree > max_degree."""
        out = {}
        for mask, poly in self._terms.items():
            budget = max_degree - weight(mask)
            if budget < 0:
                continue
            kept = poly.truncate(budget)
            if kept:
                out[mask] = kept
        return GrassmannElement._raw(self.signature, out)

    def truncate_weight(self, max_weight: int) -> "GrassmannElement":
        return GrassmannElement._raw(
            self.signature, {m: p for m, p in self._terms.items() if weight(m) <= max_weight})

    def even_part(self) -> "GrassmannElement":
        return GrassmannElement._raw(self.signature, {m: p for m, p in self._terms.items() if not weight(m) & 1})

    def odd_part(self) -> "GrassmannElement":
        return GrassmannElement._raw(self.signature, {m: p for m, p in self._terms.items() if weight(m) & 1})

    def map_coefficients(self, fn) -> "GrassmannElement":
        return GrassmannElement(self.signature, {m: fn(p) for m, p in self._terms.items()})

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            if other.signature != self.signature:
                raise ArgumentError("elements belong to different algebras")
            return other
        if isinstance(other, Polynomial):
            return GrassmannElement.from_polynomial(self.signature, other)
        if isinstance(other, (int, Fraction)):
            return GrassmannElement.scalar(self.signature, other)
        raise TypeError(f"cannot combine GrassmannElement with {type(other).__name__}")

    def __eq__(self, other) -> bool:
        if isinstance(other, GrassmannElement):
            return self.signature == other.signature and self._terms == other._terms
        if isinstance(other, (int, Fraction, Polynomial)):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.signature, frozenset(self._terms.items())))
        return self._hash

    def __neg__(self) -> "GrassmannElement":
        return GrassmannElement._raw(self.signature, {m: -p for m, p in self._terms.items()})

    def __add__(self, other) -> "GrassmannElement":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, p in other._terms.items():
            if m in out:
                s = out[m] + p
                if s:
                    out[m] = s
                else:
                    del out[m]
            else:
                out[m] = p
        return GrassmannElement._raw(self.signature, out)

    __radd__ = __add__

    def __sub__(self, other) -> "GrassmannElement":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "GrassmannElement":
        return (-self) + other

    def scale(self, c: Rational) -> "GrassmannElement":
        c = as_fraction(c)
        if not c:
            return GrassmannElement.zero(self.signature)
        return GrassmannElement._raw(self.signature, {m: p.scale(c) for m, p in self._terms.items()})

    def __mul__(self, other) -> "GrassmannElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return gmul(self, other)

    def __rmul__(self, other) -> "GrassmannElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Polynomial):
            return gmul(self._coerce(other), self)
        return NotImplemented

    def __pow__(self, n: int) -> "GrassmannElement":
        if not isinstance(n, int) or n < 0:
            raise ArgumentError("powers must be non-negative integers")
        result = GrassmannElement.one(self.signature)
        for _ in range(n):
            result = gmul(result, self)
        return result

    def __repr__(self) -> str:
        return f"GrassmannElement({format_element(self)!r})"

    def __str__(self) -> str:
        return format_element(self)


def gmul(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    """Graded product with the sign of the inversion count."""
    if a.signature != b.signature:
        raise ArgumentError("gmul: elements belong to different algebras")
    acc: dict[int, dict] = {}
    for ma, pa in a._terms.items():
        for mb, pb in b._terms.items():
            if ma & mb:
                continue
            sign = product_sign(ma, mb)
            bucket = acc.setdefault(ma | mb, {})
            mul_into(bucket, pa._terms, pb._terms, sign)
    p = a.signature.p
    out = {m: Polynomial._raw(p, t) for m, t in acc.items() if t}
    return GrassmannElement._raw(a.signature, out)


def weight_component(a: GrassmannElement, k: int) -> GrassmannElement:
    """Sum of the terms t^I with |I| = k."""
    if k < 0:
        raise ArgumentError("weight must be non-negative")
    return GrassmannElement._raw(a.signature, {m: p for m, p in a._terms.items() if weight(m) == k})


def jk_test(a: GrassmannElement, k: int) -> bool:
    """Membership in J^k of the free algebra: every term has |I| >= k."""
    return all(weight(m) >= k for m in a._terms)


def _monomial_power(ns: Sequence[GrassmannElement], alpha: Sequence[int], cache: dict) -> GrassmannElement:
    key = tuple(alpha)
    if key in cache:
        return cache[key]
    # peel one factor off the last nonzero slot
    for j in range(len(alpha) - 1, -1, -1):
        if alpha[j]:
            prev = list(alpha)
            prev[j] -= 1
            result = gmul(_monomial_power(ns, prev, cache), ns[j])
            break
    else:
        result = GrassmannElement.one(ns[0].signature)
    cache[key] = result
    return result


def apply_smooth(h: Polynomial | Expr, F: Sequence[GrassmannElement]) -> GrassmannElement:
    """The k-ary C-infinity operation on even elements.

    Each F_j splits into its body f_j (weight 0) and an even nilpotent n_j.
    The result is the full Taylor sum

        sum over alpha of (d^alpha h)(f) / alpha! * n^alpha,

    which is finite: every n_j has weight >= 2, so n^alpha vanishes once
    |alpha| > q // 2.  Atom expressions are expanded through exact jets and
    need constant bodies.
    """
    if not F:
        raise ArgumentError("apply_smooth needs at least one argument")
    sig = F[0].signature
    for f in F:
        if f.signature != sig:
            raise ArgumentError("apply_smooth: arguments belong to different algebras")
        if not f.is_even():
            raise ParityError("apply_smooth is only defined on even elements")
    k = len(F)
    bodies = [f.body() for f in F]
    nilpotents = [f - GrassmannElement.from_polynomial(sig, b) for f, b in zip(F, bodies)]
    max_order = sig.q // 2
    powers: dict = {}

    if isinstance(h, Expr) and not has_atoms(h):
        h = to_polynomial(h, k)

    if isinstance(h, Polynomial):
        if h.nvars != k:
            raise ArgumentError(f"arity mismatch: h takes {h.nvars} arguments, got {k}")
        derivs = {(0,) * k: h}
        result = GrassmannElement.zero(sig)
        for alpha in multi_indices(k, max_order):
            if any(alpha):
                j = max(i for i, e in enumerate(alpha) if e)
                parent = list(alpha)
                parent[j] -= 1
                derivs[alpha] = partial_derivative(derivs[tuple(parent)], j + 1)
            d = derivs[alpha]
            if not d:
                continue
            nalpha = _monomial_power(nilpotents, alpha, powers)
            if not nalpha:
                continue
            denom = 1
            for e in alpha:
                denom *= factorial(e)
            coeff = substitute(d, bodies).scale(Fraction(1, denom))
            result = result + gmul(GrassmannElement.from_polynomial(sig, coeff), nalpha)
        return result

    if isinstance(h, Expr):
        if arity(h) > k:
            raise ArgumentError(f"arity mismatch: expression uses t{arity(h)} but only {k} arguments given")
        if not all(b.is_constant() for b in bodies):
            raise UnsupportedCenterError("atom operations need bodies that are rational constants")
        center = [b.constant_term() for b in bodies]
        jet = jet_expand(h, center, max_order)
        result = GrassmannElement.zero(sig)
        for alpha, c in jet.items():
            nalpha = _monomial_power(nilpotents, alpha, powers)
            if nalpha:
                result = result + nalpha.scale(c)
        return result

    raise ArgumentError(f"unsupported smooth operation {h!r}")


def format_element(a: GrassmannElement, unicode: bool = False) -> str:
    """Canonical text: terms by increasing weight, then mask, then grlex desc."""
    sig = a.signature
    if a.is_zero():
        return "0"
    odd = sig.odd_names
    if unicode:
        odd = tuple("θ" + n[1:] if n.startswith("t") else n for n in odd)
    pieces = []
    for mask in sorted(a._terms, key=lambda m: (weight(m), m)):
        theta = "*".join(odd[i - 1] for i in mask_indices(mask))
        for exp, c in a._terms[mask].sorted_items():
            mono = "*".join(s for s in (format_monomial(exp, sig.even_names), theta) if s)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            pieces.append((c > 0, body))
    out = []
    for i, (positive, body) in enumerate(pieces):
        if i == 0:
            out.append(body if positive else f"-{body}")
        else:
            out.append(("+ " if positive else "- ") + body)
    return " ".join(out)


def monomial_basis(sig: AlgebraSignature, max_degree: int, min_weight: int = 0) -> list[tuple[tuple[int, ...], int]]:
    """All (exponent, mask) pairs with |exp| + |mask| <= max_degree and |mask| >= min_weight."""
    out = []
    for mask in range(1 << sig.q):
        w = weight(mask)
        if w < min_weight or w > max_degree:
            continue
        for exp in multi_indices(sig.p, max_degree - w):
            out.append((exp, mask))
    return out


def sort_monomials(monos):
    """Ascending order: total degree, weight, grlex on the polynomial part, mask."""
    return sorted(monos, key=lambda em: (sum(em[0]) + weight(em[1]), weight(em[1]), grlex_key(em[0]), em[1]))
