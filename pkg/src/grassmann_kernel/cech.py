"""Finite combinatorial covers and the Batchelor splitting construction.

The base space is a finite nerve.  Its regions are the simplices: every chart
alone, every listed overlap pair and triple.  A region S stands for the points
covered by exactly the charts in S.  Values on a region are written in the
coordinates of its reference chart, the first chart of S in cover order, so
region-wise sums and differences make sense without further transport.

Partitions of unity are rational weights rho_gamma(S) for gamma in S, summing
to one on each region.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Mapping, Sequence

from .derivations import SuperDerivation
from .errors import ArgumentError, PreconditionError, UnsupportedModelError
from .grassmann import AlgebraSignature, GrassmannElement, apply_smooth, gmul, weight_component
from .morphisms import Morphism
from .presentation import Presentation, split_search

Region = tuple[str, ...]


class GluingData:
    """Charts with split models, the overlap nerve and transition morphisms.

    ``transitions[(a, b)]`` maps the algebra of chart a to that of chart b.
    A missing reverse direction is filled in by inverting the given one.
    """

    def __init__(self, charts: Mapping[str, Presentation], nerve: Iterable[Sequence[str]],
                 transitions: Mapping[tuple[str, str], Morphism]):
        self.charts = dict(charts)
        self.order = list(self.charts)
        if not self.order:
            raise ArgumentError("a cover needs at least one chart")
        rank = {c: i for i, c in enumerate(self.order)}
        simplices: set[Region] = set()
        for simplex in nerve:
            simplex = tuple(simplex)
            if len(simplex) not in (2, 3) or len(set(simplex)) != len(simplex):
                raise ArgumentError(f"overlaps must list 2 or 3 distinct charts, got {simplex}")
            for c in simplex:
                if c not in rank:
                    raise ArgumentError(f"overlap names unknown chart {c!r}")
            simplex = tuple(sorted(simplex, key=rank.__getitem__))
            simplices.add(simplex)
            for face in combinations(simplex, 2):
                simplices.add(face)
        order_key = lambda s: (len(s), [rank[c] for c in s])
        self.nerve: list[Region] = sorted(simplices, key=order_key)
        self.regions: list[Region] = [(c,) for c in self.order] + self.nerve

        self.transitions: dict[tuple[str, str], Morphism] = {}
        for (a, b), phi in transitions.items():
            if a not in rank or b not in rank:
                raise ArgumentError(f"transition {a}->{b} names an unknown chart")
            if phi.source != self.charts[a].signature or phi.target != self.charts[b].signature:
                raise ArgumentError(f"transition {a}->{b} does not match the chart signatures")
            if a != b and tuple(sorted((a, b), key=rank.__getitem__)) not in simplices:
                raise ArgumentError(f"transition {a}->{b} is given but {a} and {b} do not overlap")
            self.transitions[(a, b)] = phi
        for a, b in [pair for s in self.nerve if len(s) == 2 for pair in (s, s[::-1])]:
            if (a, b) in self.transitions:
                continue
            if (b, a) not in self.transitions:
                raise ArgumentError(f"overlap {a} {b} has no transition")
            try:
                self.transitions[(a, b)] = self.transitions[(b, a)].inverse()
            except PreconditionError as exc:
                raise ArgumentError(f"cannot infer {a}->{b} from {b}->{a}: {exc}") from exc

    def signature(self, chart: str) -> AlgebraSignature:
        return self.charts[chart].signature

    def transition(self, a: str, b: str) -> Morphism:
        if a == b and (a, a) not in self.transitions:
            return Morphism.identity(self.signature(a))
        return self.transitions[(a, b)]

    def reference(self, region: Region) -> str:
        return region[0]

    def regions_of(self, chart: str) -> list[Region]:
        return [s for s in self.regions if chart in s]


# -- cocycle conditions on the gluing data ----------------------------------------


@dataclass
class Violation:
    kind: str  # "diagonal", "inverse" or "triple"
    charts: tuple[str, ...]
    generator: str
    expected: GrassmannElement
    actual: GrassmannElement


@dataclass
class CocycleReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _first_difference(lhs: Morphism, rhs: Morphism):
    for name, a, b in zip(lhs.source.generator_names, lhs.images, rhs.images):
        if a != b:
            return name, b, a
    return None


def check_cocycles(g: GluingData) -> CocycleReport:
    """phi_aa = id, phi_ab then phi_ba = id, and phi_ab then phi_bc = phi_ac."""
    report = CocycleReport()
    for c in g.order:
        if (c, c) in g.transitions:
            diff = _first_difference(g.transitions[(c, c)], Morphism.identity(g.signature(c)))
            if diff:
                report.violations.append(Violation("diagonal", (c,), *diff))
    for s in g.nerve:
        if len(s) != 2:
            continue
        a, b = s
        for x, y in ((a, b), (b, a)):
            diff = _first_difference(g.transition(x, y).then(g.transition(y, x)),
                                     Morphism.identity(g.signature(x)))
            if diff:
                report.violations.append(Violation("inverse", (x, y), *diff))
    for s in g.nerve:
        if len(s) != 3:
            continue
        a, b, c = s
        diff = _first_difference(g.transition(a, b).then(g.transition(b, c)), g.transition(a, c))
        if diff:
            report.violations.append(Violation("triple", s, *diff))
    return report


# -- cochains and partitions of unity ---------------------------------------------


def _scale(value, c: Fraction):
    return value * c if isinstance(value, (int, Fraction)) else value.scale(c)


def _is_zero(value) -> bool:
    return not value


class PartitionWeights:
    """rho[region][chart]: non-negative rationals summing to one per region."""

    def __init__(self, regions: Iterable[Region], weights: Mapping[Region, Mapping[str, Fraction]]):
        self.regions = list(regions)
        self.weights: dict[Region, dict[str, Fraction]] = {}
        for s in self.regions:
            given = weights.get(s)
            if given is None:
                raise ArgumentError(f"no weights on region {s}")
            row = {c: Fraction(given.get(c, 0)) for c in s}
            extra = set(given) - set(s)
            if any(Fraction(given[c]) for c in extra):
                raise ArgumentError(f"weight of a chart outside region {s} must vanish")
            if any(v < 0 for v in row.values()):
                raise ArgumentError(f"negative weight on region {s}")
            if sum(row.values()) != 1:
                raise ArgumentError(f"weights on region {s} sum to {sum(row.values())}, not 1")
            self.weights[s] = row

    @classmethod
    def from_chart_weights(cls, regions: Iterable[Region], chart_weights: Mapping[str, Fraction]) -> "PartitionWeights":
        """rho_a(S) = w_a / sum_{c in S} w_c."""
        regions = list(regions)
        table = {}
        for s in regions:
            total = sum(Fraction(chart_weights.get(c, 0)) for c in s)
            if total <= 0:
                raise ArgumentError(f"chart weights vanish on region {s}")
            table[s] = {c: Fraction(chart_weights.get(c, 0)) / total for c in s}
        return cls(regions, table)

    def __getitem__(self, key: tuple[Region, str]) -> Fraction:
        s, c = key
        return self.weights[s].get(c, Fraction(0))


class Cochain0:
    """Per chart a and region S containing a, a value in S's reference frame."""

    def __init__(self, regions: Iterable[Region], values: Mapping[tuple[str, Region], Any],
                 truncation: Mapping[str, int] | None = None):
        self.regions = list(regions)
        self.values = dict(values)
        self.truncation = dict(truncation or {})
        for s in self.regions:
            for c in s:
                if (c, s) not in self.values:
                    raise ArgumentError(f"missing value for chart {c} on region {s}")

    def __getitem__(self, key: tuple[str, Region]):
        return self.values[key]


class Cochain1:
    """Per ordered pair (a, b) and region S containing both, an antisymmetric value."""

    def __init__(self, regions: Iterable[Region], values: Mapping[tuple[tuple[str, str], Region], Any], zero):
        self.regions = list(regions)
        self.zero = zero
        self.values: dict[tuple[tuple[str, str], Region], Any] = {}
        for ((a, b), s), v in values.items():
            if a == b:
                if not _is_zero(v):
                    raise ArgumentError(f"diagonal entry ({a},{a}) must vanish")
                continue
            rev = ((b, a), s)
            if rev in self.values and self.values[rev] != -v:
                raise ArgumentError(f"entries ({a},{b}) and ({b},{a}) on {s} are not antisymmetric")
            self.values[((a, b), s)] = v
            self.values[rev] = -v

    def get(self, a: str, b: str, s: Region):
        if a == b:
            return self.zero
        return self.values.get(((a, b), s), self.zero)

    def nonzero_entries(self) -> int:
        """Number of unordered pairs and regions with a nonzero value."""
        return sum(1 for ((a, b), s), v in self.values.items() if s.index(a) < s.index(b) and not _is_zero(v))

    def is_zero(self) -> bool:
        return self.nonzero_entries() == 0


def cocycle_defect(omega: Cochain1):
    """First (region, triple) where w_ab + w_bc != w_ac, or None."""
    for s in omega.regions:
        for a, b, c in combinations(s, 3):
            if omega.get(a, b, s) + omega.get(b, c, s) != omega.get(a, c, s):
                return s, (a, b, c)
    return None


def coboundary(tau: Cochain0, zero) -> Cochain1:
    """(delta tau)_ab = tau_b - tau_a on each region."""
    values = {}
    for s in tau.regions:
        for a, b in combinations(s, 2):
            values[((a, b), s)] = tau[b, s] - tau[a, s]
    return Cochain1(tau.regions, values, zero)


def cochain_difference(sigma: Cochain0) -> Cochain1:
    """omega_ab = sigma_b - sigma_a on every overlap region."""
    if len(set(sigma.truncation.values())) > 1:
        raise ArgumentError(f"liftings have incompatible truncations {sigma.truncation}")
    values = list(sigma.values.values())
    kinds = {type(v) for v in values}
    if len(kinds) > 1:
        raise ArgumentError("liftings mix value types")
    sigs = {v.signature for v in values if hasattr(v, "signature")}
    if len(sigs) > 1:
        raise ArgumentError("liftings live in different algebras")
    zero = values[0] - values[0] if values else Fraction(0)
    return coboundary(sigma, zero)


def pou_coboundary(omega: Cochain1, rho: PartitionWeights) -> Cochain0:
    """tau_a = sum_g rho_g * omega_ga, so that tau_b - tau_a = omega_ab.

    The cocycle identity is checked first and the postcondition is asserted
    exactly before returning.
    """
    defect = cocycle_defect(omega)
    if defect is not None:
        s, triple = defect
        raise PreconditionError(f"omega is not a cocycle on region {s}: triple {triple}")
    values = {}
    for s in omega.regions:
        for a in s:
            total = omega.zero
            for g in s:
                w = rho[s, g]
                if w and g != a:
                    total = total + _scale(omega.get(g, a, s), w)
            values[(a, s)] = total
    tau = Cochain0(omega.regions, values)
    delta = coboundary(tau, omega.zero)
    for s in omega.regions:
        for a, b in combinations(s, 2):
            if delta.get(a, b, s) != omega.get(a, b, s):
                raise AssertionError(f"delta tau != omega on {s} for ({a},{b})")
    return tau


# -- the Batchelor construction ------------------------------------------------------


@dataclass
class StageRecord:
    weight: int
    obstruction_entries: int
    coboundary_verified: bool


@dataclass
class BatchelorReport:
    """Outcome of project_and_split.

    ``sigma[S]`` lists the images of the even generators of the reference
    chart of S; ``phi[(S, a)]`` and ``psi[(S, a)]`` are the chart-wise maps
    Sym F -> O and back, in chart a's coordinates.
    """

    status: str  # "split" or "coboundary-unavailable"
    stages: list[StageRecord] = field(default_factory=list)
    sigma: dict[Region, tuple[GrassmannElement, ...]] = field(default_factory=dict)
    epsilon: dict[Region, tuple[GrassmannElement, ...]] = field(default_factory=dict)
    phi: dict[tuple[Region, str], Morphism] = field(default_factory=dict)
    psi: dict[tuple[Region, str], Morphism] = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "split" and all(c["passed"] for c in self.checks)


def transport_lift(g: GluingData, src: str, dst: str, images: Sequence[GrassmannElement]) -> list[GrassmannElement]:
    """Move an even lift written in chart src's frame into chart dst's frame.

    ``images`` are lifts of the even generators of src.  The even generator
    y_k of dst is the function body(phi_{dst->src}(y_k)) of the src
    coordinates; its lift is that function applied to ``images`` and then
    carried over by phi_{src->dst}.
    """
    if src == dst:
        return list(images)
    forward = g.transition(src, dst)
    backward = g.transition(dst, src)
    return [forward.apply(apply_smooth(img.body(), images)) for img in backward.even_images]


def _lift_derivation(sig: AlgebraSignature, even: Sequence[GrassmannElement],
                     odd: Sequence[GrassmannElement] | None = None) -> SuperDerivation:
    return SuperDerivation(sig, 0, even, odd)


def _check_models(g: GluingData) -> None:
    dims = {(pres.signature.p, pres.signature.q) for pres in g.charts.values()}
    if len(dims) != 1:
        raise UnsupportedModelError(f"charts have different dimensions {sorted(dims)}")
    for name, pres in g.charts.items():
        if pres.is_free():
            continue
        verdict = split_search(pres)
        if not verdict:
            raise UnsupportedModelError(
                f"chart {name} has a non-split model (no adapted derivation at d={verdict.d}, D={verdict.D})")
        raise UnsupportedModelError(
            f"chart {name} carries relations; only free (split) coordinate models are supported")


def project_and_split(g: GluingData, rho: PartitionWeights | None = None,
                      initial: Mapping[str, Sequence[GrassmannElement]] | None = None) -> BatchelorReport:
    """Build a global section of O -> O_red and assemble Sym F -> O chart-wise.

    Stage i (i = 1..q+1) corrects the weight-i part of the lifting: every
    chart produces a local lift from the current global one, the differences
    form the obstruction cocycle omega, and the partition of unity solves
    delta tau = omega.  ``initial`` optionally supplies chart-level lifts
    (images of the even generators); the default is the coordinate inclusion.
    """
    report_cocycles = check_cocycles(g)
    if not report_cocycles.passed:
        v = report_cocycles.violations[0]
        raise PreconditionError(f"gluing data violates the {v.kind} condition on {v.charts} at {v.generator}")
    _check_models(g)
    first = g.order[0]
    sig0 = g.signature(first)
    p, q = sig0.p, sig0.q
    if rho is not None and list(rho.regions) != list(g.regions):
        rho = PartitionWeights(g.regions, {s: rho.weights.get(s, {}) for s in g.regions})

    init = {}
    for c in g.order:
        sig = g.signature(c)
        given = (initial or {}).get(c)
        init[c] = list(given) if given is not None else [GrassmannElement.x(sig, k) for k in range(1, p + 1)]
        if len(init[c]) != p or any(img.signature != sig or not img.is_even() for img in init[c]):
            raise ArgumentError(f"initial lift of chart {c} must list {p} even elements")

    # global lift per region, in the reference frame; start from the reference chart
    sigma = {s: [img.truncate_weight(0) for img in init[g.reference(s)]] for s in g.regions}
    report = BatchelorReport("split")

    for i in range(1, q + 2):
        local = {}
        for s in g.regions:
            r = g.reference(s)
            sig_r = g.signature(r)
            for a in s:
                in_a = transport_lift(g, r, a, sigma[s])
                in_a = [(lo.truncate_weight(i - 1) + weight_component(ini, i))
                        for lo, ini in zip(in_a, init[a])]
                back = [img.truncate_weight(i) for img in transport_lift(g, a, r, in_a)]
                local[(a, s)] = _lift_derivation(sig_r, back)
        lifts = Cochain0(g.regions, local, {c: i for c in g.order})
        omega = cochain_difference(lifts)
        entries = omega.nonzero_entries()
        if entries and rho is None:
            report.status = "coboundary-unavailable"
            report.stages.append(StageRecord(i, entries, False))
            return report
        if rho is None:
            report.stages.append(StageRecord(i, 0, True))
            for s in g.regions:
                sigma[s] = list(lifts[g.reference(s), s].even_coeffs)
            continue
        tau = pou_coboundary(omega, rho)
        report.stages.append(StageRecord(i, entries, True))
        for s in g.regions:
            corrected = [lifts[a, s] - tau[a, s] for a in s]
            if any(c != corrected[0] for c in corrected):
                raise AssertionError(f"corrected lifts disagree on region {s}")
            sigma[s] = list(corrected[0].even_coeffs)

    # odd lifts epsilon: F -> J, averaged the same way
    local_eps = {}
    for s in g.regions:
        r = g.reference(s)
        sig_r = g.signature(r)
        for a in s:
            sigma_a = transport_lift(g, r, a, sigma[s])
            to_a, to_r = g.transition(r, a), g.transition(a, r)
            sig_a = g.signature(a)
            eps = []
            for img in to_a.odd_images:
                lin = weight_component(img, 1)
                lifted = GrassmannElement.zero(sig_a)
                for mask, poly in lin.items():
                    coeff = apply_smooth(poly, sigma_a) if p else GrassmannElement.scalar(sig_a, poly.constant_term())
                    lifted = lifted + gmul(coeff, GrassmannElement.monomial(sig_a, (0,) * p, mask))
                eps.append(to_r.apply(lifted))
            zero_even = [GrassmannElement.zero(sig_r)] * p
            local_eps[(a, s)] = _lift_derivation(sig_r, zero_even, eps)
    eps_lifts = Cochain0(g.regions, local_eps)
    eps_omega = cochain_difference(eps_lifts)
    epsilon = {}
    if not eps_omega.is_zero() and rho is None:
        report.status = "coboundary-unavailable"
        return report
    eps_tau = pou_coboundary(eps_omega, rho) if rho is not None else None
    for s in g.regions:
        r = g.reference(s)
        value = eps_lifts[r, s] if eps_tau is None else eps_lifts[r, s] - eps_tau[r, s]
        epsilon[s] = list(value.odd_coeffs)

    report.sigma = {s: tuple(v) for s, v in sigma.items()}
    report.epsilon = {s: tuple(v) for s, v in epsilon.items()}
    _assemble(g, report)
    return report


def _assemble(g: GluingData, report: BatchelorReport) -> None:
    checks = report.checks
    for s in g.regions:
        r = g.reference(s)
        sig_r = g.signature(r)
        sigma = report.sigma[s]
        ok = all(img.body() == GrassmannElement.x(sig_r, k + 1).body() for k, img in enumerate(sigma))
        for a in s:
            in_a = transport_lift(g, r, a, sigma)
            sig_a = g.signature(a)
            ok = ok and all(img.body() == GrassmannElement.x(sig_a, k + 1).body() for k, img in enumerate(in_a))
        checks.append({"name": "projection", "region": s, "passed": ok})

        phi_r = Morphism(sig_r, sig_r, list(sigma) + list(report.epsilon[s]))
        psi_r = phi_r.inverse()
        for a in s:
            to_r, to_a = g.transition(a, r), g.transition(r, a)
            phi_a = to_r.graded().then(phi_r).then(to_a)
            psi_a = to_r.then(psi_r).then(to_a.graded())
            report.phi[(s, a)] = phi_a
            report.psi[(s, a)] = psi_a
            ident = Morphism.identity(g.signature(a))
            checks.append({"name": "two-sided inverse", "region": s, "chart": a,
                           "passed": phi_a.then(psi_a) == ident and psi_a.then(phi_a) == ident})
            checks.append({"name": "graded identity", "region": s, "chart": a,
                           "passed": phi_a.graded() == ident})
            checks.append({"name": "ring morphism", "region": s, "chart": a,
                           "passed": _multiplicative(phi_a)})
        for a, b in combinations(s, 2):
            lhs = g.transition(a, b).graded().then(report.phi[(s, b)])
            rhs = report.phi[(s, a)].then(g.transition(a, b))
            checks.append({"name": "overlap compatibility", "region": s, "charts": (a, b),
                           "passed": lhs == rhs})


def _multiplicative(phi: Morphism) -> bool:
    gens = GrassmannElement.generators(phi.source)
    for u in gens:
        for v in gens:
            if phi.apply(gmul(u, v)) != gmul(phi.apply(u), phi.apply(v)):
                return False
    return True
