"""Seeded random generators for elements and polynomials."""

from __future__ import annotations

import random
from fractions import Fraction

from .coeff import Polynomial, multi_indices
from .grassmann import AlgebraSignature, GrassmannElement, weight


def random_rational(rng: random.Random, bound: int = 5) -> Fraction:
    while True:
        num = rng.randint(-bound, bound)
        if num:
            return Fraction(num, rng.randint(1, 3))


def random_polynomial(rng: random.Random, nvars: int, max_degree: int, max_terms: int = 3) -> Polynomial:
    exps = list(multi_indices(nvars, max_degree))
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        terms[rng.choice(exps)] = random_rational(rng)
    return Polynomial(nvars, terms)


def random_element(
    rng: random.Random,
    sig: AlgebraSignature,
    parity: int | None = None,
    max_terms: int = 4,
    max_coeff_degree: int = 2,
    poly_terms: int = 2,
) -> GrassmannElement:
    """Sparse random element; ``parity`` 0/1 restricts to even/odd masks."""
    masks = [m for m in range(1 << sig.q) if parity is None or weight(m) % 2 == parity]
    if not masks:
        return GrassmannElement.zero(sig)
    terms: dict[int, Polynomial] = {}
    for _ in range(rng.randint(1, max_terms)):
        m = rng.choice(masks)
        p = random_polynomial(rng, sig.p, max_coeff_degree, poly_terms)
        terms[m] = terms[m] + p if m in terms else p
    return GrassmannElement(sig, terms)
