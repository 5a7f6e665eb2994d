"""Shared strategies and helpers for the test suite."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from symips.algebra import GF2, QQ, Monomial, Polynomial, Variable, prime_field

XS = [Variable("x", (i,)) for i in range(4)]


def poly_of(field, terms):
    """terms: iterable of (coeff, {var: exp}) pairs."""
    return Polynomial.from_terms(
        field, [(Monomial(pairs.items()), c) for c, pairs in terms]
    )


@st.composite
def monomials(draw, variables=XS, max_exp=3, max_vars=3):
    n = draw(st.integers(0, max_vars))
    chosen = draw(
        st.lists(st.sampled_from(variables), min_size=n, max_size=n, unique=True)
    )
    pairs = [(v, draw(st.integers(1, max_exp))) for v in chosen]
    return Monomial(pairs)


@st.composite
def polynomials(draw, field=QQ, variables=XS, max_terms=4):
    n = draw(st.integers(0, max_terms))
    terms = []
    for _ in range(n):
        m = draw(monomials(variables))
        if field.kind == "Q":
            c = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
        else:
            c = draw(st.integers(0, field.characteristic - 1))
        terms.append((m, c))
    return Polynomial.from_terms(field, terms)


FIELDS = [QQ, GF2, prime_field(5)]


@pytest.fixture(scope="session")
def subset_instances():
    from symips.instances import gen_subset_sum

    return {n: gen_subset_sum(n, QQ, n + 1) for n in (2, 3, 4)}
