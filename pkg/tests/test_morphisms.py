import random
from fractions import Fraction

import pytest
import sympy

from grassmann_kernel.coeff import Polynomial
from grassmann_kernel.errors import ArgumentError, ParityError, PreconditionError
from grassmann_kernel.grassmann import AlgebraSignature, GrassmannElement, gmul, weight_component
from grassmann_kernel.morphisms import Morphism, truncate_images
from grassmann_kernel.sampling import random_element


def high_weight(rng, sig, parity, min_weight):
    a = random_element(rng, sig, parity=parity, max_terms=3)
    return a - sum((weight_component(a, k) for k in range(min_weight)), GrassmannElement.zero(sig))


def random_invertible(rng, sig):
    """Affine body, constant invertible odd matrix, arbitrary higher-weight tail."""
    p, q = sig.p, sig.q
    while True:
        A = [[Fraction(rng.randint(-2, 2)) for _ in range(p)] for _ in range(p)]
        L = [[Fraction(rng.randint(-2, 2)) for _ in range(q)] for _ in range(q)]
        if _det(A) and _det(L):
            break
    images = []
    for i in range(p):
        body = Polynomial.constant(p, rng.randint(-3, 3))
        for j in range(p):
            body = body + Polynomial.variable(p, j + 1).scale(A[i][j])
        images.append(GrassmannElement.from_polynomial(sig, body) + high_weight(rng, sig, 0, 2))
    for i in range(q):
        lin = GrassmannElement.zero(sig)
        for j in range(q):
            lin = lin + GrassmannElement.theta(sig, j + 1).scale(L[i][j])
        images.append(lin + high_weight(rng, sig, 1, 3))
    return Morphism(sig, sig, images)


def random_morphism(rng, sig):
    images = [random_element(rng, sig, parity=0, max_terms=2) for _ in range(sig.p)]
    images += [random_element(rng, sig, parity=1, max_terms=2) for _ in range(sig.q)]
    return Morphism(sig, sig, images)


def _det(M):
    return sympy.Matrix(M).det() if M else 1


SIGS = [AlgebraSignature(1, 2), AlgebraSignature(2, 3), AlgebraSignature(1, 4), AlgebraSignature(0, 3)]


def test_identity_fixes_elements():
    rng = random.Random(30)
    for sig in SIGS:
        ident = Morphism.identity(sig)
        for _ in range(10):
            a = random_element(rng, sig)
            assert ident(a) == a


def test_parity_of_images_is_checked(s12):
    sig, x, t1, t2 = s12
    with pytest.raises(ParityError):
        Morphism(sig, sig, [t1, t1, t2])
    with pytest.raises(ParityError):
        Morphism(sig, sig, [x, x, t2])


def test_image_count_is_checked(s12):
    sig, x, t1, t2 = s12
    with pytest.raises(ArgumentError):
        Morphism(sig, sig, [x, t1])


def test_from_mapping_defaults_to_same_name(s12):
    sig, x, t1, t2 = s12
    m = Morphism.from_mapping(sig, sig, {"x1": x + t1 * t2})
    assert m.images == (x + t1 * t2, t1, t2)
    with pytest.raises(ArgumentError):
        Morphism.from_mapping(sig, sig, {"y": x})


def test_shift_example(s12):
    sig, x, t1, t2 = s12
    m = Morphism.from_mapping(sig, sig, {"x1": x + t1 * t2})
    assert m(x * x) == x * x + 2 * x * t1 * t2
    assert m(x * t1) == x * t1
    assert m.inverse().images[0] == x - t1 * t2


def test_apply_is_multiplicative():
    rng = random.Random(31)
    for sig in SIGS:
        for _ in range(25):
            m = random_morphism(rng, sig)
            a, b = random_element(rng, sig), random_element(rng, sig)
            assert m(gmul(a, b)) == gmul(m(a), m(b))
            assert m(a + b) == m(a) + m(b)


def test_then_is_composition():
    rng = random.Random(32)
    for sig in SIGS:
        for _ in range(15):
            f, g, h = (random_morphism(rng, sig) for _ in range(3))
            a = random_element(rng, sig)
            assert f.then(g)(a) == g(f(a))
            assert f.then(g).then(h) == f.then(g.then(h))


def test_inverse_two_sided():
    rng = random.Random(33)
    for sig in SIGS:
        for _ in range(10):
            m = random_invertible(rng, sig)
            inv = m.inverse()
            ident = Morphism.identity(sig)
            assert m.then(inv) == ident
            assert inv.then(m) == ident


def test_non_affine_body_is_rejected(s12):
    sig, x, t1, t2 = s12
    with pytest.raises(PreconditionError):
        Morphism(sig, sig, [x * x, t1, t2]).inverse()


def test_singular_odd_matrix_is_rejected(s12):
    sig, x, t1, t2 = s12
    with pytest.raises(PreconditionError):
        Morphism(sig, sig, [x, t1, t1]).inverse()


def test_graded_is_functorial():
    rng = random.Random(34)
    for sig in SIGS:
        for _ in range(10):
            f, g = random_invertible(rng, sig), random_invertible(rng, sig)
            assert f.then(g).graded() == f.graded().then(g.graded())
            assert f.inverse().graded() == f.graded().inverse()


def test_graded_keeps_body_and_weight_one(s12):
    sig, x, t1, t2 = s12
    m = Morphism(sig, sig, [x + 1 + t1 * t2, t1 + x * t2, t2])
    assert m.graded().images == (x + 1, t1 + x * t2, t2)


def test_truncate_images(s12):
    sig, x, t1, t2 = s12
    m = Morphism(sig, sig, [x + t1 * t2, t1, t2])
    assert truncate_images(m, 1).images == (x, t1, t2)


def test_equality_and_hash(s12):
    sig, x, t1, t2 = s12
    a = Morphism(sig, sig, [x, t1, t2])
    assert a == Morphism.identity(sig)
    assert hash(a) == hash(Morphism.identity(sig))
