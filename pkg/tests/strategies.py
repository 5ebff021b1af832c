"""Hypothesis strategies for kernel values."""

from fractions import Fraction

from hypothesis import strategies as st

from grassmann_kernel.coeff import Polynomial
from grassmann_kernel.grassmann import AlgebraSignature, GrassmannElement, weight

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def exponents(nvars: int, max_degree: int):
    return st.lists(st.integers(0, max_degree), min_size=nvars, max_size=nvars).filter(
        lambda e: sum(e) <= max_degree).map(tuple)


def polynomials(nvars: int, max_degree: int = 3, max_terms: int = 4):
    return st.dictionaries(exponents(nvars, max_degree), rationals, max_size=max_terms).map(
        lambda t: Polynomial(nvars, t))


def elements(sig: AlgebraSignature, parity=None, max_degree: int = 2, max_terms: int = 4):
    masks = [m for m in range(1 << sig.q) if parity is None or weight(m) % 2 == parity]
    return st.dictionaries(st.sampled_from(masks), polynomials(sig.p, max_degree, 2),
                           max_size=max_terms).map(lambda t: GrassmannElement(sig, t))


def homogeneous(sig: AlgebraSignature, max_degree: int = 2):
    return st.integers(0, 1).flatmap(lambda par: elements(sig, par, max_degree))
