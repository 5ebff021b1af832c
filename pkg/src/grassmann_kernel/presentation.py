"""Finitely presented superrings at a fixed truncation order.

Everything is linear algebra over the monomial basis of total degree <= D
(total degree = polynomial degree + odd weight).  The truncated ideal is the
span of the products m*r with deg(m*r) <= D; elements are cut at degree D
before any membership test, which is what "modulo total degree > D" means
throughout this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .coeff import Polynomial, grlex_key
from .derivations import AdaptednessReport, SuperDerivation, adapted_check, derive_apply
from .errors import ArgumentError, ParityError, TruncationError
from .grassmann import (
    AlgebraSignature,
    GrassmannElement,
    gmul,
    monomial_basis,
    sort_monomials,
    weight,
)
from .linalg import RowReducer, solve

Monomial = tuple[tuple[int, ...], int]


def pivot_priority(mono: Monomial) -> tuple:
    """Column key: total degree desc, weight asc, grlex desc, mask desc."""
    exp, mask = mono
    deg, lex = grlex_key(exp)
    w = weight(mask)
    return (-(deg + w), w, -deg, tuple(-e for e in lex), -mask)


class Ambient:
    """Indexed monomial basis of the free algebra up to total degree D."""

    def __init__(self, sig: AlgebraSignature, D: int):
        self.signature = sig
        self.D = D
        self.monomials: list[Monomial] = sorted(monomial_basis(sig, D), key=pivot_priority)
        self.index = {m: i for i, m in enumerate(self.monomials)}

    def __len__(self) -> int:
        return len(self.monomials)

    def vector(self, a: GrassmannElement, truncate: bool = False) -> dict[int, Fraction]:
        if truncate:
            a = a.truncate(self.D)
        out = {}
        for exp, mask, c in a.monomial_items():
            col = self.index.get((tuple(exp), mask))
            if col is None:
                raise TruncationError(
                    f"term of total degree {sum(exp) + weight(mask)} exceeds D={self.D}")
            out[col] = c
        return out

    def element(self, vec: dict[int, Fraction]) -> GrassmannElement:
        sig = self.signature
        buckets: dict[int, dict] = {}
        for col, c in vec.items():
            exp, mask = self.monomials[col]
            buckets.setdefault(mask, {})[exp] = c
        return GrassmannElement(sig, {m: Polynomial(sig.p, t) for m, t in buckets.items()})

    def basis_element(self, col: int) -> GrassmannElement:
        exp, mask = self.monomials[col]
        return GrassmannElement.monomial(self.signature, exp, mask)


class SpanBasis:
    """Row-reduced span of elements inside an ambient monomial basis."""

    def __init__(self, ambient: Ambient, reducer: RowReducer | None = None):
        self.ambient = ambient
        self.reducer = reducer if reducer is not None else RowReducer()

    def copy(self) -> "SpanBasis":
        return SpanBasis(self.ambient, self.reducer.copy())

    @property
    def rank(self) -> int:
        return self.reducer.rank

    @property
    def pivot_columns(self) -> list[int]:
        return sorted(self.reducer.pivots)

    def rows(self) -> list[dict[int, Fraction]]:
        """The reduced row echelon form, rows ordered by pivot column."""
        return [dict(self.reducer.pivots[c]) for c in self.pivot_columns]

    def add(self, a: GrassmannElement, label=None) -> bool:
        return self.reducer.insert(self.ambient.vector(a), label)

    def contains(self, a: GrassmannElement, truncate: bool = True) -> bool:
        return not self.reducer.reduce(self.ambient.vector(a, truncate))

    def reduce(self, a: GrassmannElement, truncate: bool = True) -> GrassmannElement:
        return self.ambient.element(self.reducer.reduce(self.ambient.vector(a, truncate)))

    def standard_monomials(self) -> list[GrassmannElement]:
        pivots = self.reducer.pivots
        free = [self.ambient.monomials[c] for c in range(len(self.ambient)) if c not in pivots]
        return [GrassmannElement.monomial(self.ambient.signature, e, m) for e, m in sort_monomials(free)]


@dataclass(frozen=True, eq=False)
class Presentation:
    """Quotient of the free algebra on ``signature`` by ``relations``.

    ``d`` bounds polynomial degrees of derivation coefficients in
    ``split_search``; ``D`` is the total-degree truncation.
    """

    signature: AlgebraSignature
    relations: tuple[GrassmannElement, ...] = ()
    d: int | None = None
    D: int | None = None

    def __post_init__(self):
        rels = tuple(self.relations)
        object.__setattr__(self, "relations", rels)
        for r in rels:
            if r.signature != self.signature:
                raise ArgumentError("relation lives in another algebra")
            if not r:
                raise ArgumentError("relations must be nonzero")
            if r.parity() is None:
                raise ParityError(f"relation {r} is not parity-homogeneous")
        top = max((r.total_degree() for r in rels), default=0)
        D = self.D if self.D is not None else max(4, self.signature.q, top)
        d = self.d if self.d is not None else min(2, D)
        if d < 0 or D < 0:
            raise ArgumentError("bounds must be non-negative")
        if D < top:
            raise ArgumentError(f"D={D} is below the relation degree {top}")
        if d > D:
            raise ArgumentError(f"d={d} exceeds D={D}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "D", D)

    @classmethod
    def free(cls, sig: AlgebraSignature, d: int | None = None, D: int | None = None) -> "Presentation":
        return cls(sig, (), d, D)

    def with_bounds(self, d: int | None = None, D: int | None = None) -> "Presentation":
        return Presentation(self.signature, self.relations,
                            self.d if d is None else d, self.D if D is None else D)

    def is_free(self) -> bool:
        return not self.relations

    def __eq__(self, other) -> bool:
        if not isinstance(other, Presentation):
            return NotImplemented
        return (self.signature, self.relations, self.d, self.D) == (
            other.signature, other.relations, other.d, other.D)

    def __hash__(self) -> int:
        return hash((self.signature, self.relations, self.d, self.D))

    @cached_property
    def ambient(self) -> Ambient:
        return Ambient(self.signature, self.D)

    @cached_property
    def ideal(self) -> SpanBasis:
        """Span of m*r over monomials m with deg(m*r) <= D, with certificates."""
        span = SpanBasis(self.ambient, RowReducer(track=True))
        for idx, r in enumerate(self.relations):
            room = self.D - r.total_degree()
            for exp, mask in sort_monomials(monomial_basis(self.signature, room)):
                m = GrassmannElement.monomial(self.signature, exp, mask)
                product = gmul(m, r)
                if product:
                    span.add(product, (idx, exp, mask))
        return span

    def filtration_span(self, k: int) -> SpanBasis:
        """Span of J^k + I inside degree <= D."""
        cache = self.__dict__.setdefault("_filtration", {})
        if k not in cache:
            span = self.ideal.copy()
            span.reducer.track = False
            for exp, mask in sort_monomials(monomial_basis(self.signature, self.D, min_weight=k)):
                span.reducer.insert({self.ambient.index[(exp, mask)]: Fraction(1)})
            cache[k] = span
        return cache[k]


class FiltrationQuotient:
    """Membership in J^k + I modulo total degree > D, for adaptedness checks."""

    def __init__(self, pres: Presentation, D: int | None = None):
        self.presentation = pres if D is None or D == pres.D else pres.with_bounds(min(pres.d, D), D)

    def contains(self, a: GrassmannElement, k: int) -> bool:
        return self.presentation.filtration_span(k).contains(a)


# -- membership ------------------------------------------------------------------


@dataclass
class Membership:
    member: bool
    element: GrassmannElement
    D: int
    certificate: dict[int, GrassmannElement] | None = None

    def __bool__(self) -> bool:
        return self.member

    def expand(self, pres: Presentation) -> GrassmannElement:
        """Recompute sum_r multiplier_r * r from the certificate."""
        total = GrassmannElement.zero(pres.signature)
        for idx, q in (self.certificate or {}).items():
            total = total + gmul(q, pres.relations[idx])
        return total


def _check_degree(f: GrassmannElement, pres: Presentation) -> None:
    if f.signature != pres.signature:
        raise ArgumentError("element and presentation have different signatures")
    if f.total_degree() > pres.D:
        raise TruncationError(f"element has total degree {f.total_degree()} > D={pres.D}; raise D")


def member(f: GrassmannElement, pres: Presentation) -> Membership:
    """Decide f in span{m*r : deg(m*r) <= D}; on success attach multipliers."""
    _check_degree(f, pres)
    span = pres.ideal
    residual, combo = span.reducer.reduce(pres.ambient.vector(f), with_combo=True)
    if residual:
        return Membership(False, f, pres.D)
    sig = pres.signature
    multipliers: dict[int, GrassmannElement] = {}
    for (idx, exp, mask), c in combo.items():
        term = GrassmannElement.monomial(sig, exp, mask, c)
        multipliers[idx] = multipliers[idx] + term if idx in multipliers else term
    multipliers = {i: q for i, q in sorted(multipliers.items()) if q}
    return Membership(True, f, pres.D, multipliers)


def normal_form(f: GrassmannElement, pres: Presentation) -> GrassmannElement:
    """Representative of f with no monomial in the pivot set of the ideal."""
    _check_degree(f, pres)
    return pres.ideal.reduce(f, truncate=False)


def reduced_presentation(pres: Presentation) -> Presentation:
    """Kill the odd generators: keep the weight-0 part of every relation."""
    sig = pres.signature.reduced()
    rels = []
    for r in pres.relations:
        body = r.body()
        if body:
            rels.append(GrassmannElement.from_polynomial(sig, body))
    return Presentation(sig, tuple(rels), pres.d, pres.D)


def quotient_basis(pres: Presentation) -> list[GrassmannElement]:
    """Standard monomials: a vector-space basis of the truncated quotient."""
    return pres.ideal.standard_monomials()


# -- associated graded -----------------------------------------------------------


@dataclass
class GradedPiece:
    """Gr^k = (J^k + I)/(J^{k+1} + I) inside total degree <= D.

    ``basis`` is a monomial basis of the vector space, ``generators`` a
    minimal generating set over the reduced ring at the origin, and ``rank``
    its size.
    """

    k: int
    D: int
    basis: list[GrassmannElement]
    generators: list[GrassmannElement]

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def dimension(self) -> int:
        return len(self.basis)


def graded_basis(pres: Presentation, k: int) -> GradedPiece:
    if k < 0:
        raise ArgumentError("weight must be non-negative")
    sig = pres.signature
    amb = pres.ambient
    upper = pres.filtration_span(k + 1)
    level = sort_monomials(monomial_basis(sig, pres.D, min_weight=k))

    basis_span = upper.copy()
    basis = []
    for exp, mask in level:
        if basis_span.reducer.insert({amb.index[(exp, mask)]: Fraction(1)}):
            basis.append(GrassmannElement.monomial(sig, exp, mask))

    # generators: Gr^k modulo the maximal ideal (x1..xp) times Gr^k
    gen_span = upper.copy()
    for exp, mask in level:
        m = GrassmannElement.monomial(sig, exp, mask)
        for i in range(1, sig.p + 1):
            shifted = gmul(GrassmannElement.x(sig, i), m).truncate(pres.D)
            if shifted:
                gen_span.add(shifted)
    generators = []
    for b in basis:
        if gen_span.add(b):
            generators.append(b)
    return GradedPiece(k, pres.D, basis, generators)


# -- splitness ---------------------------------------------------------------------


@dataclass
class SplitCertificate:
    derivation: SuperDerivation
    d: int
    D: int
    adaptedness: AdaptednessReport
    relations_preserved: list[bool] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.adaptedness.passed and all(self.relations_preserved)

    def checks(self) -> list[dict]:
        out = [{"name": "adapted", "passed": self.adaptedness.passed,
                "checked": self.adaptedness.checked}]
        for i, ok in enumerate(self.relations_preserved):
            out.append({"name": f"relation {i + 1} preserved", "passed": ok})
        return out


@dataclass
class NoCertificate:
    """No adapted even derivation with coefficient degree <= d modulo degree > D."""

    d: int
    D: int
    unknowns: int = 0
    equations: int = 0

    def __bool__(self) -> bool:
        return False


def _candidate_basis(sig: AlgebraSignature, d: int) -> list[tuple[int, tuple[int, ...], int]]:
    """(generator slot, exponent, mask) for every unknown coefficient."""
    out = []
    for slot in range(sig.p + sig.q):
        want = 0 if slot < sig.p else 1
        for exp, mask in sort_monomials(monomial_basis(sig, d + sig.q)):
            if sum(exp) <= d and weight(mask) % 2 == want:
                out.append((slot, exp, mask))
    return out


def _basic_derivation(sig: AlgebraSignature, slot: int, exp, mask) -> SuperDerivation:
    zero = GrassmannElement.zero(sig)
    images = [zero] * (sig.p + sig.q)
    images[slot] = GrassmannElement.monomial(sig, exp, mask)
    return SuperDerivation(sig, 0, images[: sig.p], images[sig.p:])


def relation_preservation(E: SuperDerivation, pres: Presentation) -> list[bool]:
    """For each relation r: is E(r), cut at degree D, in the truncated ideal."""
    return [pres.ideal.contains(derive_apply(E, r)) for r in pres.relations]


def split_search(pres: Presentation, d: int | None = None, D: int | None = None):
    """Search for an even derivation adapted to the J-adic filtration.

    Unknowns are the coefficients of E on the generators (polynomial degree
    <= d).  Constraints, all modulo total degree > D:

    * E(r) lies in the ideal for every relation r;
    * (E - k) m lies in J^{k+1} + I for every monomial m of weight >= k.

    A solution is re-verified independently and returned as a
    SplitCertificate; infeasibility yields NoCertificate(d, D), a verdict
    about these bounds only.
    """
    d = pres.d if d is None else d
    D = pres.D if D is None else D
    if d < 0 or d > D:
        raise ArgumentError(f"need 0 <= d <= D, got d={d}, D={D}")
    pres = pres.with_bounds(d, D)
    sig = pres.signature
    amb = pres.ambient
    unknowns = _candidate_basis(sig, d)
    basics = [_basic_derivation(sig, *u) for u in unknowns]

    # Row-reduce each constraint family once, then collect rows per coordinate.
    equations: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []

    def add_block(columns: list[dict[int, Fraction]], target: dict[int, Fraction]):
        coords: dict[int, dict[int, Fraction]] = {}
        for j, vec in enumerate(columns):
            for c, v in vec.items():
                coords.setdefault(c, {})[j] = v
        for c in set(coords) | set(target):
            equations.append(coords.get(c, {}))
            rhs.append(target.get(c, Fraction(0)))

    ideal = pres.ideal
    for r in pres.relations:
        cols = [ideal.reducer.reduce(amb.vector(derive_apply(B, r), truncate=True)) for B in basics]
        add_block(cols, {})

    for k in range(sig.q + 1):
        span = pres.filtration_span(k + 1)
        for exp, mask in sort_monomials(monomial_basis(sig, D, min_weight=k)):
            m = GrassmannElement.monomial(sig, exp, mask)
            cols = [span.reducer.reduce(amb.vector(derive_apply(B, m), truncate=True)) for B in basics]
            target = span.reducer.reduce(amb.vector(m.scale(k)))
            add_block(cols, target)

    solution = solve(equations, rhs, len(unknowns))
    if solution is None:
        return NoCertificate(d, D, len(unknowns), len(equations))

    E = SuperDerivation.zero(sig)
    for coeff, B in zip(solution, basics):
        if coeff:
            E = E + B.scale(coeff)
    report = adapted_check(E, pres, D)
    return SplitCertificate(E, d, D, report, relation_preservation(E, pres))
