from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from brickcount.exact import (
    BinomialRep, NonIntegralError, Poly, SingularMatrixError, binomial, binomial_from_monomial,
    falling_binomial_poly, format_poly, interpolate, monomial_from_binomial, solve_exact_linear,
    stirling_first, stirling_second,
)

small_ints = st.integers(min_value=-50, max_value=50)


def test_binomial_matches_math_comb():
    for m in range(12):
        for k in range(-1, 14):
            assert binomial(m, k) == (comb(m, k) if 0 <= k else 0)


def test_stirling_small_tables():
    # s(4, .) signed, S(4, .)
    assert [stirling_first(4, i) for i in range(5)] == [0, -6, 11, -6, 1]
    assert [stirling_second(4, i) for i in range(5)] == [0, 1, 7, 6, 1]


def test_stirling_inverse_pair():
    for k in range(8):
        for i in range(k + 1):
            s = sum(stirling_first(k, j) * stirling_second(j, i) for j in range(i, k + 1))
            assert s == (1 if i == k else 0)


def test_poly_arithmetic():
    p = Poly([1, 2, 3])
    q = Poly([-1, 1])
    assert (p * q)(Fraction(5, 2)) == p(Fraction(5, 2)) * q(Fraction(5, 2))
    assert (p + q).coeffs == (0, 3, 3)
    quo, rem = (p * q + 7).divmod(q)
    assert quo == p and rem == Poly([7])
    assert Poly([0, 0, 0]).degree == -1
    assert Poly([1, 2]).reversed(3) == Poly([0, 0, 2, 1])


def test_format_poly():
    assert format_poly(Poly([-1, 0, Fraction(1, 2)])) == "1/2 w^2 - 1"
    assert format_poly(Poly([])) == "0"


def test_falling_binomial_poly():
    p = falling_binomial_poly(3)
    assert [p(w) for w in range(1, 8)] == [comb(w - 1, 3) for w in range(1, 8)]


def test_interpolate_recovers_cubic():
    p = Poly([3, -1, 0, 2])
    assert interpolate([(x, p(x)) for x in (-1, 0, 2, 5)]) == p


def test_solve_exact_linear():
    x = solve_exact_linear([[2, 1], [1, 3]], [3, 5])
    assert x == [Fraction(4, 5), Fraction(7, 5)]
    with pytest.raises(SingularMatrixError):
        solve_exact_linear([[1, 2], [2, 4]], [1, 2])


@given(st.lists(small_ints, min_size=1, max_size=9))
def test_binomial_basis_round_trip(coeffs):
    rep = BinomialRep(len(coeffs), tuple(coeffs))
    p = monomial_from_binomial(rep)
    assert all(p(w) == rep(w) for w in range(1, 12))
    back = binomial_from_monomial(p, len(coeffs))
    # trailing zeros are not kept by the monomial form
    trimmed = list(coeffs)
    while len(trimmed) > 1 and trimmed[-1] == 0:
        trimmed.pop()
    assert list(back.coeffs) == trimmed or (not any(coeffs) and not any(back.coeffs))


@given(st.lists(small_ints, min_size=1, max_size=7))
def test_integer_valued_monomial_round_trip(values):
    # any integer values at w = 1..k give an integer binomial expansion
    p = interpolate(list(enumerate(values, 1)))
    rep = binomial_from_monomial(p)
    assert monomial_from_binomial(rep) == p


def test_non_integral_binomial_rejected():
    with pytest.raises(NonIntegralError):
        binomial_from_monomial(Poly([0, Fraction(1, 3)]))
