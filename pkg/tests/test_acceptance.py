"""Acceptance suite: one test per criterion, each with its own time budget.

Run under pytest (a PASS/FAIL summary is printed at the end) or directly with
``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from grassmann_kernel.cech import (  # noqa: E402
    GluingData,
    PartitionWeights,
    check_cocycles,
    coboundary,
    cochain_difference,
    pou_coboundary,
    project_and_split,
)
from grassmann_kernel.coeff import Polynomial, substitute  # noqa: E402
from grassmann_kernel.derivations import (  # noqa: E402
    SuperDerivation,
    adapted_check,
    derive_apply,
    euler_field,
    filtration_splitting,
)
from grassmann_kernel.dsl import parse_model, print_model  # noqa: E402
from grassmann_kernel.errors import UnsupportedModelError  # noqa: E402
from grassmann_kernel.grassmann import (  # noqa: E402
    AlgebraSignature,
    GrassmannElement,
    apply_smooth,
    gmul,
    weight,
)
from grassmann_kernel.morphisms import Morphism  # noqa: E402
from grassmann_kernel.presentation import (  # noqa: E402
    NoCertificate,
    Presentation,
    SplitCertificate,
    graded_basis,
    member,
    normal_form,
    quotient_basis,
    reduced_presentation,
    split_search,
)
from grassmann_kernel.sampling import random_element, random_polynomial  # noqa: E402
from gen_models import random_document  # noqa: E402
from test_cech import (  # noqa: E402
    REGIONS3,
    S13,
    assert_split_invariants,
    random_cochain0,
    three_chart_transitions,
)

MODELS = Path(__file__).resolve().parent.parent / "models"
S12 = AlgebraSignature(1, 2)


class Budget:
    """Context manager asserting a wall-clock limit in seconds."""

    def __init__(self, seconds: float):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.elapsed = time.perf_counter() - self.start
        if exc_type is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f}s, budget {self.seconds}s"


def th(sig, *js):
    out = GrassmannElement.one(sig)
    for j in js:
        out = out * GrassmannElement.theta(sig, j)
    return out


def nonsplit(d, D):
    x, t1, t2 = GrassmannElement.generators(S12)
    return Presentation(S12, (x * x + t1 * t2,), d=d, D=D)


def test_criterion_01_smooth_ring_axioms():
    rng = random.Random(101)
    with Budget(10):
        for case in range(500):
            sig = AlgebraSignature(1, 2 if case % 2 else 4)
            k = rng.randint(1, 3)
            F = [random_element(rng, sig, parity=0, max_coeff_degree=2) for _ in range(k)]
            i = rng.randrange(k)
            assert apply_smooth(Polynomial.variable(k, i + 1), F) == F[i]
        for case in range(500):
            sig = AlgebraSignature(1, 2 if case % 2 else 4)
            F = [random_element(rng, sig, parity=0, max_coeff_degree=2) for _ in range(2)]
            g = random_polynomial(rng, 2, 3, 3)
            hs = [random_polynomial(rng, 2, 3, 3) for _ in range(2)]
            assert apply_smooth(substitute(g, hs), F) == apply_smooth(g, [apply_smooth(h, F) for h in hs])


def test_criterion_02_full_taylor_consistency():
    rng = random.Random(102)
    t = Polynomial.variable(1, 1)
    with Budget(5):
        for _ in range(200):
            sig = AlgebraSignature(1, rng.randint(0, 4))
            F = random_element(rng, sig, parity=0)
            power = GrassmannElement.one(sig)
            for m in range(6):
                assert apply_smooth(t ** m, [F]) == power
                power = gmul(power, F)
        S4 = AlgebraSignature(1, 4)
        x = GrassmannElement.x(S4, 1)
        F = x + th(S4, 1, 2) + th(S4, 3, 4)
        square = apply_smooth(t ** 2, [F])
        assert square == x * x + 2 * x * th(S4, 1, 2) + 2 * x * th(S4, 3, 4) + 2 * th(S4, 1, 2, 3, 4)
        assert square.terms[0b1111] == Polynomial.constant(1, 2)


def test_criterion_03_graded_ring_laws():
    rng = random.Random(103)
    sig = AlgebraSignature(1, 5)
    with Budget(10):
        for _ in range(1000):
            pa, pb = rng.randint(0, 1), rng.randint(0, 1)
            a = random_element(rng, sig, parity=pa, max_terms=3)
            b = random_element(rng, sig, parity=pb, max_terms=3)
            c = random_element(rng, sig, max_terms=3)
            assert gmul(gmul(a, b), c) == gmul(a, gmul(b, c))
            assert gmul(a, b + c) == gmul(a, b) + gmul(a, c)
            assert gmul(a + b, c) == gmul(a, c) + gmul(b, c)
            assert gmul(a, b) == gmul(b, a).scale((-1) ** (pa * pb))
            odd = a if pa else b if pb else random_element(rng, sig, parity=1, max_terms=3)
            assert gmul(odd, odd).is_zero()


def test_criterion_04_euler_eigen_structure():
    with Budget(5):
        for q in range(6):
            sig = AlgebraSignature(1, q)
            E = euler_field(sig)
            for mask in range(1 << q):
                m = GrassmannElement.monomial(sig, (0,), mask)
                assert derive_apply(E, m) == m.scale(weight(mask))
            for k in range(q + 1):
                dims = filtration_splitting(E, k, 6)
                assert dims["J^k"] == dims["kernel"] + dims["J^k+1"]
                assert dims["intersection"] == 0


def test_criterion_05_adaptedness():
    with Budget(2):
        for q in range(6):
            assert adapted_check(euler_field(AlgebraSignature(1, q)), None, max_degree=q + 1).passed
        x, t1, t2 = GrassmannElement.generators(S12)
        perturbed = euler_field(S12) + SuperDerivation(S12, 0, None, [GrassmannElement.zero(S12), t1])
        report = adapted_check(perturbed, None, max_degree=3)
        assert not report.passed
        assert report.failing_k == 1
        assert report.witness == t2 and report.image == t1


def test_criterion_06_nonsplit_verdict():
    for d, D in ((2, 4), (4, 6)):
        with Budget(10):
            verdict = split_search(nonsplit(d, D))
        assert isinstance(verdict, NoCertificate)
        assert (verdict.d, verdict.D) == (d, D)
    with Budget(1):
        cert = split_search(Presentation.free(S12, d=1, D=2))
    assert isinstance(cert, SplitCertificate) and cert.valid
    assert cert.derivation == euler_field(S12)
    x, t1, t2 = GrassmannElement.generators(S12)
    with Budget(5):
        cert = split_search(Presentation(S12, (t1 - x * t2,), d=2, D=4))
    assert isinstance(cert, SplitCertificate) and cert.valid


def test_criterion_07_ideal_arithmetic():
    x, t1, t2 = GrassmannElement.generators(S12)
    with Budget(2):
        pres = nonsplit(4, 6)
        result = member(x ** 4, pres)
        assert result.member and result.expand(pres) == x ** 4
        assert normal_form(x * x, pres) == -(t1 * t2)
        assert not member(t1, pres).member
        red = reduced_presentation(pres)
        xr = GrassmannElement.x(red.signature, 1)
        assert quotient_basis(red) == [GrassmannElement.one(red.signature), xr]


def test_criterion_08_graded_ranks():
    with Budget(5):
        for q in range(6):
            pres = Presentation.free(AlgebraSignature(1, q), d=0, D=q + 1)
            for k in range(q + 1):
                assert graded_basis(pres, k).rank == comb(q, k)
        piece = graded_basis(nonsplit(4, 6), 2)
        assert piece.rank == 1
        assert piece.generators == [th(S12, 1, 2)]


def test_criterion_09_cech_mechanics():
    rng = random.Random(109)
    x, t1, t2, t3 = GrassmannElement.generators(S13)
    ab, bc, ac = three_chart_transitions()
    free = {c: Presentation.free(S13) for c in "ABC"}
    with Budget(5):
        g = GluingData(free, [("A", "B", "C")], {("A", "B"): ab, ("B", "C"): bc, ("A", "C"): ac,
                                                  ("A", "A"): Morphism(S13, S13, [x + t1 * t2, t1, t2, t3])})
        diag = [v for v in check_cocycles(g).violations if v.kind == "diagonal"]
        assert [(v.charts, v.generator) for v in diag] == [(("A",), "x1")]
        assert diag[0].actual == x + t1 * t2

        wrong = ab.inverse().then(Morphism(S13, S13, [x, t1, t2 + t1, t3]))
        g = GluingData(free, [("A", "B", "C")], {("A", "B"): ab, ("B", "A"): wrong, ("B", "C"): bc,
                                                  ("A", "C"): ac})
        kinds = {(v.kind, v.charts) for v in check_cocycles(g).violations}
        assert ("inverse", ("A", "B")) in kinds

        broken = Morphism(S13, S13, [*ac.images[:3], ac.images[3] + x * t1 * t2 * t3])
        g = GluingData(free, [("A", "B", "C")], {("A", "B"): ab, ("B", "C"): bc, ("A", "C"): broken})
        triple = [v for v in check_cocycles(g).violations if v.kind == "triple"]
        assert [(v.charts, v.generator) for v in triple] == [(("A", "B", "C"), "t3")]
        assert triple[0].actual - triple[0].expected == -(x * t1 * t2 * t3)

        for _ in range(200):
            sig = AlgebraSignature(rng.randint(0, 2), rng.randint(1, 3))
            omega = cochain_difference(random_cochain0(rng, sig))
            table = {}
            for s in REGIONS3:
                raw = {c: Fraction(rng.randint(0, 4)) for c in s}
                if not sum(raw.values()):
                    raw[s[0]] = Fraction(1)
                total = sum(raw.values())
                table[s] = {c: v / total for c, v in raw.items()}
            tau = pou_coboundary(omega, PartitionWeights(REGIONS3, table))
            delta = coboundary(tau, omega.zero)
            for s in REGIONS3:
                for a, b in combinations(s, 2):
                    assert delta.get(a, b, s) == omega.get(a, b, s)


def test_criterion_10_batchelor_end_to_end():
    x, t1, t2 = GrassmannElement.generators(S12)
    with Budget(10):
        phi = Morphism(S12, S12, [x + t1 * t2, t1, t2])
        g = GluingData({"A": Presentation.free(S12), "B": Presentation.free(S12)}, [("A", "B")],
                       {("A", "B"): phi})
        rho = PartitionWeights.from_chart_weights(g.regions, {"A": Fraction(1, 2), "B": Fraction(1, 2)})
        report = project_and_split(g, rho)
        assert_split_invariants(g, report)
        assert report.sigma[("A", "B")] == (x - Fraction(1, 2) * t1 * t2,)

        bad = GluingData({"A": nonsplit(4, 6), "B": Presentation.free(S12)}, [("A", "B")],
                         {("A", "B"): Morphism.identity(S12)})
        try:
            project_and_split(bad, rho)
        except UnsupportedModelError as exc:
            assert "non-split" in str(exc)
        else:
            raise AssertionError("relation chart was accepted")


def _corrupt(rng, text):
    chars = list(text)
    for _ in range(rng.randint(1, 4)):
        pos = rng.randrange(len(chars) + 1)
        if chars and rng.random() < 0.5:
            del chars[min(pos, len(chars) - 1)]
        else:
            chars.insert(pos, rng.choice("$;(){}=^*/+-#x1t2 \n"))
    return "".join(chars)


def test_criterion_11_front_end_robustness():
    rng = random.Random(111)
    with Budget(5):
        for _ in range(500):
            model = parse_model(random_document(rng))
            assert model.ok
            text = print_model(model)
            again = parse_model(text)
            assert again.ok and again.items == model.items and print_model(again) == text

        text = (MODELS / "nonsplit.gk").read_text()
        model = parse_model(text)
        assert print_model(model) == text
        assert model.presentation() == nonsplit(4, 6)

        text = (MODELS / "two_charts.gk").read_text()
        model = parse_model(text)
        assert print_model(model) == text
        glue = model.cover.gluing()
        x, t1, t2 = GrassmannElement.generators(S12)
        assert glue.nerve == [("A", "B")]
        assert glue.transition("A", "B") == Morphism(S12, S12, [x + t1 * t2, t1, t2])
        rho = model.cover.partition(glue)
        assert rho[("A", "B"), "A"] == rho[("A", "B"), "B"] == Fraction(1, 2)

        bad = parse_model((MODELS / "malformed.gk").read_text())
        found = [(d.line, d.col, d.code) for d in bad.diagnostics]
        assert found[:2] == [(2, 10, "E302"), (3, 15, "E100")]
        assert (4, 13, "E300") in found
        for _ in range(300):
            broken = parse_model(_corrupt(rng, random_document(rng)))
            assert all(d.line >= 1 and d.col >= 1 for d in broken.diagnostics)


CRITERIA = [value for name, value in sorted(globals().items()) if name.startswith("test_criterion_")]


if __name__ == "__main__":
    failures = 0
    for fn in CRITERIA:
        try:
            fn()
            status = "PASS"
        except Exception as exc:  # report and keep going
            status = f"FAIL ({type(exc).__name__}: {exc})"
            failures += 1
        print(f"{status.split()[0]}  {fn.__name__}" + ("" if status == "PASS" else "  " + status[5:]))
    sys.exit(1 if failures else 0)
