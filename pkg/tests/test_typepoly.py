from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from brickcount import fixtures
from brickcount.flat import count_flat
from brickcount.typepoly import (
    FITTED, FITTED_SYMMETRIC, FitError, PolynomialFamily, classify_offsets, fit_polynomial,
    gf_numerator, identity_suite, leading_coefficient_series, polynomial_from_counts,
    pyramid_count, pyramid_polynomial, reference_families, type_coefficients,
    type_coefficients_from_counts, type_multiplicity_check, widths_needed,
)


def test_classify_offsets():
    t = classify_offsets([0, 5, -2, 3], 3)
    assert t.residues == (0, 2, 1, 0) and t.q == (0, 1, -1, 1) and t.k == 3


def test_type_coefficients_two_ways():
    assert type_coefficients(4) == type_coefficients(4, method="counts") == [1, 43, 123, 82]


def test_inverse_of_binomial_sum():
    rep = fixtures.binomial_rep(5)
    values = [rep(w) for w in range(1, 6)]
    assert type_coefficients_from_counts(values) == list(rep.coeffs)


@pytest.mark.parametrize("n,w", [(3, 4), (4, 3)])
def test_multiplicity(n, w):
    rep = type_multiplicity_check(n, w)
    assert rep.ok and not rep.offenders
    assert sum(rep.structures_by_k.values()) == count_flat(w, n)


def test_fit_with_and_without_symmetry():
    counter = lambda w, n: count_flat(w, n, engine="native")  # noqa: E731
    plain = polynomial_from_counts(5, counter)
    sym = polynomial_from_counts(5, counter, use_symmetry=True)
    assert plain.monomial == sym.monomial == fixtures.monomial(5)
    assert plain.source == FITTED and sym.source == FITTED_SYMMETRIC
    assert widths_needed(5, True) == [1, 2, 3, 4]


def test_fit_needs_enough_points():
    with pytest.raises(FitError):
        fit_polynomial(4, [(1, 1), (2, 3)])
    with pytest.raises(FitError):
        fit_polynomial(3, [(1, 1), (2, 5), (3, 13), (4, 26)])  # last point off the quadratic


@pytest.mark.parametrize("n", range(1, 15))
def test_reference_polynomials_satisfy_identities(n):
    fam = reference_families(n)[-1]
    assert all(identity_suite(fam).values())


@pytest.mark.parametrize("n", range(3, 9))
def test_gf_numerator_against_reference(n):
    fam = reference_families(n)[-1]
    g = gf_numerator(fam)
    data = fixtures.gf_numerator_data(n)
    top = [int(c) for c in data["A"]]
    assert [int(c) for c in reversed(g.A.coeffs)][:len(top)] == top
    assert g.palindromic and g.reciprocity and g.unimodal and g.even_factor_ok
    if "B" in data:
        assert [int(c) for c in reversed(g.B.coeffs)][:len(data["B"])] == data["B"]


@pytest.mark.parametrize("n", range(1, 7))
def test_pyramid_polynomial(n):
    fam = pyramid_polynomial(n)
    assert all(fam(w) == pyramid_count(n, w) for w in range(1, 9))


def test_family_json_round_trip():
    fam = reference_families(6)[-1]
    assert PolynomialFamily.from_json(fam.to_json()) == fam


def test_leading_coefficients_from_top_binomial_coefficient():
    # only C(w-1, n-1) contributes w^(n-1), with weight 1/(n-1)!
    lead = leading_coefficient_series(reference_families(8))
    assert lead[:2] == [1, 2]
    for n in range(3, 9):
        assert lead[n - 1] == Fraction(fixtures.binomial_rep(n).coeffs[-1], factorial(n - 1))


@given(st.integers(1, 9), st.integers(-8, 8))
def test_reflection_symmetry_of_reference_polynomials(n, w):
    p = fixtures.monomial(n)
    assert p(1 - w) == (-1) ** (n - 1) * p(w)
