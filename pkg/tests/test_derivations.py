import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grassmann_kernel.derivations import (
    RawLinearMap,
    SuperDerivation,
    adapted_check,
    d_dtheta,
    derive_apply,
    eigen_decompose,
    euler_field,
    filtration_splitting,
    format_derivation,
    leibniz_check,
)
from grassmann_kernel.errors import ArgumentError, ParityError
from grassmann_kernel.grassmann import (
    AlgebraSignature,
    GrassmannElement,
    gmul,
    mask_indices,
    weight,
    weight_component,
)
from grassmann_kernel.sampling import random_element
from oracles import bubble_sign
from strategies import elements, rationals


def th(sig, *js):
    out = GrassmannElement.one(sig)
    for j in js:
        out = out * GrassmannElement.theta(sig, j)
    return out


def random_derivation(rng, sig, parity=None):
    parity = rng.randint(0, 1) if parity is None else parity
    even = [random_element(rng, sig, parity=parity, max_terms=2) for _ in range(sig.p)]
    odd = [random_element(rng, sig, parity=1 - parity, max_terms=2) for _ in range(sig.q)]
    return SuperDerivation(sig, parity, even, odd)


def oracle_d_dtheta(sig, exp, mask, j):
    """Move t_j to the front by adjacent swaps, then drop it."""
    idx = mask_indices(mask)
    if j not in idx:
        return GrassmannElement.zero(sig)
    rest = [i for i in idx if i != j]
    sign = bubble_sign([j] + rest)
    out = GrassmannElement.monomial(sig, exp, sum(1 << (i - 1) for i in rest))
    return out.scale(sign)


class TestConstruction:
    def test_parity_is_validated(self, s12):
        sig, x, t1, t2 = s12
        with pytest.raises(ParityError):
            SuperDerivation(sig, 0, [t1], None)
        with pytest.raises(ParityError):
            SuperDerivation(sig, 1, None, [t1, GrassmannElement.zero(sig)])

    def test_from_images_infers_parity(self, s12):
        sig, x, t1, t2 = s12
        assert SuperDerivation.from_images(sig, [t1 * t2, t1, t2]).parity == 0
        assert SuperDerivation.from_images(sig, [t1, x, t1 * t2]).parity == 1

    def test_from_images_rejects_mixed(self, s12):
        sig, x, t1, t2 = s12
        with pytest.raises(ParityError):
            SuperDerivation.from_images(sig, [t1, t1, t2])

    def test_signature_mismatch(self, s12):
        sig, x, t1, t2 = s12
        other = AlgebraSignature(1, 3)
        with pytest.raises(ArgumentError):
            derive_apply(euler_field(sig), GrassmannElement.theta(other, 1))


class TestDeriveApply:
    def test_odd_partial_first_position(self, s12):
        _, _, t1, t2 = s12
        assert d_dtheta(t1 * t2, 1) == t2

    def test_odd_partial_second_position(self, s12):
        _, _, t1, t2 = s12
        assert d_dtheta(t1 * t2, 2) == -t1

    def test_even_partial(self, s12):
        sig, x, t1, _ = s12
        assert derive_apply(SuperDerivation.partial_x(sig, 1), x * x * t1) == 2 * x * t1

    def test_odd_partial_matches_oracle_exhaustively(self):
        sig = AlgebraSignature(1, 5)
        for mask in range(1 << 5):
            for j in range(1, 6):
                m = GrassmannElement.monomial(sig, (2,), mask, 3)
                assert d_dtheta(m, j) == oracle_d_dtheta(sig, (2,), mask, j).scale(3)

    def test_linearity_in_argument(self):
        rng = random.Random(1)
        sig = AlgebraSignature(2, 4)
        for _ in range(100):
            D = random_derivation(rng, sig)
            a, b = random_element(rng, sig), random_element(rng, sig)
            c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
            assert D(a + b.scale(c)) == D(a) + D(b).scale(c)

    def test_linearity_in_derivation(self):
        rng = random.Random(2)
        sig = AlgebraSignature(2, 4)
        for _ in range(100):
            par = rng.randint(0, 1)
            D1, D2 = random_derivation(rng, sig, par), random_derivation(rng, sig, par)
            a = random_element(rng, sig)
            assert (D1 + D2)(a) == D1(a) + D2(a)
            assert (D1 - D2.scale(3))(a) == D1(a) - D2(a).scale(3)

    def test_parity_bookkeeping(self):
        rng = random.Random(4)
        sig = AlgebraSignature(1, 4)
        for _ in range(200):
            D = random_derivation(rng, sig)
            a = random_element(rng, sig, parity=rng.randint(0, 1))
            out = D(a)
            if out:
                assert out.parity() == (D.parity + a.parity()) % 2


class TestLeibniz:
    def test_euler_passes(self):
        report = leibniz_check(euler_field(AlgebraSignature(1, 3)), trials=500)
        assert report.passed and report.checked >= 500

    def test_zero_passes(self):
        assert leibniz_check(SuperDerivation.zero(AlgebraSignature(1, 2)), trials=50).passed

    def test_injected_raw_map_fails_with_witness(self, s12):
        sig, x, t1, t2 = s12
        raw = RawLinearMap(sig, 0, {((0,), 0b01): t1, ((0,), 0b11): GrassmannElement.zero(sig)})
        report = leibniz_check(raw, trials=10)
        assert not report.passed
        assert report.witness == (t1, t2)

    def test_random_derivations_pass(self):
        rng = random.Random(5)
        for _ in range(20):
            sig = AlgebraSignature(rng.randint(0, 2), rng.randint(0, 4))
            assert leibniz_check(random_derivation(rng, sig), trials=30, seed=rng.randint(0, 99)).passed

    def test_mutation_is_caught(self):
        rng = random.Random(6)
        for _ in range(40):
            sig = AlgebraSignature(rng.randint(0, 2), rng.randint(2, 4))
            D = random_derivation(rng, sig)
            # pick a monomial that is a product of at least two generators
            while True:
                exp = tuple(rng.randint(0, 1) for _ in range(sig.p))
                mask = rng.randrange(1 << sig.q)
                if sum(exp) + weight(mask) >= 2:
                    break
            target = (weight(mask) + D.parity) % 2
            delta = random_element(rng, sig, parity=target, max_terms=2)
            if not delta:
                continue
            mutated = RawLinearMap.from_derivation(D).mutate(exp, mask, delta)
            assert not leibniz_check(mutated, trials=5).passed

    def test_trials_must_be_positive(self):
        with pytest.raises(ArgumentError):
            leibniz_check(euler_field(AlgebraSignature(0, 1)), trials=0)


class TestEuler:
    def test_q2_coefficients(self, s12):
        sig, x, t1, t2 = s12
        E = euler_field(sig)
        assert E.odd_coeffs == (t1, t2)
        assert all(not c for c in E.even_coeffs)
        assert format_derivation(E) == "t1*d/dt1 + t2*d/dt2"

    def test_q0_is_zero(self):
        assert euler_field(AlgebraSignature(2, 0)).is_zero()

    def test_kills_even_generators(self, s12):
        sig, x, _, _ = s12
        assert derive_apply(euler_field(sig), x).is_zero()

    @pytest.mark.parametrize("q", range(6))
    def test_eigen_equation_exhaustive(self, q):
        sig = AlgebraSignature(1, q)
        E = euler_field(sig)
        for mask in range(1 << q):
            m = GrassmannElement.monomial(sig, (1,), mask)
            assert derive_apply(E, m) == m.scale(weight(mask))


class TestEigenDecompose:
    def test_top_weight(self):
        sig = AlgebraSignature(0, 3)
        a = th(sig, 1, 2, 3)
        assert eigen_decompose(a, euler_field(sig)).components == {3: a}

    def test_weight_zero(self, s12):
        sig, x, _, _ = s12
        assert eigen_decompose(x, euler_field(sig)).components == {0: x}

    def test_mixed(self, s12):
        sig, x, t1, t2 = s12
        dec = eigen_decompose(x + x * t1 + 3 * t1 * t2, euler_field(sig))
        assert dec.decomposable
        assert dec.components == {0: x, 1: x * t1, 2: 3 * t1 * t2}

    @given(elements(AlgebraSignature(1, 4)))
    def test_agrees_with_weight_component(self, a):
        dec = eigen_decompose(a, euler_field(a.signature))
        assert dec.decomposable
        for k in range(5):
            assert dec.components.get(k, GrassmannElement.zero(a.signature)) == weight_component(a, k)

    def test_non_decomposable(self, s12):
        # E = t1 d/dt2 is nilpotent, so t2 is not a sum of eigenvectors
        sig, x, t1, t2 = s12
        E = SuperDerivation(sig, 0, None, [GrassmannElement.zero(sig), t1])
        dec = eigen_decompose(t2, E)
        assert not dec.decomposable

    def test_odd_derivation_rejected(self, s12):
        sig, x, t1, t2 = s12
        with pytest.raises(ArgumentError):
            eigen_decompose(x, SuperDerivation.partial_theta(sig, 1))


class TestAdaptedness:
    def test_euler_free_passes(self, s12):
        assert adapted_check(euler_field(s12[0]), None, max_degree=4).passed

    def test_perturbed_euler_fails_at_one(self, s12):
        sig, x, t1, t2 = s12
        E = euler_field(sig) + SuperDerivation(sig, 0, None, [GrassmannElement.zero(sig), t1])
        report = adapted_check(E, None, max_degree=3)
        assert not report.passed
        assert report.failing_k == 1
        assert report.witness == t2
        assert report.image == t1

    def test_zero_fails_at_one(self):
        sig = AlgebraSignature(0, 1)
        report = adapted_check(SuperDerivation.zero(sig), None, max_degree=2)
        assert not report.passed
        assert report.failing_k == 1
        assert report.image == -GrassmannElement.theta(sig, 1)

    def test_free_needs_degree(self, s12):
        with pytest.raises(ArgumentError):
            adapted_check(euler_field(s12[0]))

    def test_odd_rejected(self, s12):
        with pytest.raises(ArgumentError):
            adapted_check(SuperDerivation.partial_theta(s12[0], 1), None, max_degree=2)


@pytest.mark.parametrize("p,q,D", [(1, 2, 3), (2, 3, 3), (0, 4, 4), (1, 5, 5)])
def test_filtration_splits(p, q, D):
    E = euler_field(AlgebraSignature(p, q))
    for k in range(q + 1):
        dims = filtration_splitting(E, k, D)
        assert dims["J^k"] == dims["kernel"] + dims["J^k+1"]
        assert dims["intersection"] == 0


@given(st.integers(0, 1), st.integers(0, 1), rationals)
def test_left_multiply_is_derivation(pd, pr, c):
    rng = random.Random(int(c * 100) + pd * 7 + pr)
    sig = AlgebraSignature(1, 3)
    D = random_derivation(rng, sig, pd)
    r = random_element(rng, sig, parity=pr, max_terms=2)
    rD = D.left_multiply(r.scale(c))
    a = random_element(rng, sig)
    assert rD(a) == gmul(r.scale(c), D(a))
    if rD:
        assert leibniz_check(rD, trials=10).passed
