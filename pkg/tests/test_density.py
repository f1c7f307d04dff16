from fractions import Fraction

import pytest

from hermdeg.density import (
    alpha,
    alpha_nearly,
    alpha_prime,
    alpha_reduction_rhs,
    alpha_selfdual,
    brute_A,
    brute_count,
    density_poly,
    derivative_normalization,
    exact_count,
    gauss_sum,
    gauss_sum_enumerated,
    hyperbolic_augment,
    mu,
)
from hermdeg.errors import BadExponents, BadSize, BudgetExceeded, NotIncoherentLocal, NotInert
from hermdeg.hermitian import HermitianMatrix
from hermdeg.quadfield import make_field


def test_brute_examples(diag, gauss):
    assert brute_A(gauss, diag(1), diag(1), 3, 1) == 4
    assert brute_A(gauss, diag(1), diag(1), 3, 2) == 12
    assert brute_A(gauss, diag(1), diag(3), 3, 1) == 1


def test_brute_rejects_split_prime(diag, gauss):
    with pytest.raises(NotInert):
        brute_A(gauss, diag(1), diag(1), 5, 1)


def test_brute_budget_is_explicit(diag, gauss):
    with pytest.raises(BudgetExceeded):
        brute_A(gauss, diag(1, 1), diag(1, 1), 3, 2, budget=10)


def test_brute_cache_round_trip(diag, gauss, tmp_path):
    first = brute_A(gauss, diag(1, 3), diag(1, 3), 3, 1, cache_dir=tmp_path)
    assert list(tmp_path.iterdir())
    assert brute_A(gauss, diag(1, 3), diag(1, 3), 3, 1, cache_dir=tmp_path) == first == 324


@pytest.mark.parametrize("e", range(4))
@pytest.mark.parametrize("k", [1, 2, 3])
def test_gauss_sum_matches_enumeration(e, k):
    if e > k:
        pytest.skip("exponent above level")
    assert gauss_sum(e, 3, k) == gauss_sum_enumerated(-4, e, 3, k)


@pytest.mark.parametrize(
    "s,t,k",
    [
        ((1, 3), (1, 3), 1),
        ((1, 3), (1, 3), 2),
        ((1, 3), (3, 9), 2),
        ((1, 1), (1, 3), 2),
        ((1, 1, 3), (1,), 2),
        ((1, 1, 3), (1, 1, 3), 1),
        ((1, 9), (1,), 3),
        ((3,), (3,), 3),
    ],
)
def test_orbit_count_equals_column_enumeration(diag, gauss, s, t, k):
    assert exact_count(gauss, diag(*s), diag(*t), 3, k) == brute_A(gauss, diag(*s), diag(*t), 3, k)


def test_orbit_count_with_off_diagonal_target(gauss, diag):
    t = HermitianMatrix.from_pairs(gauss, [[[3, 0], [1, 0]], [[1, 0], [6, 0]]])
    assert exact_count(gauss, diag(1, 3), t, 3, 2) == brute_A(gauss, diag(1, 3), t, 3, 2)


def test_alpha_examples(diag, gauss):
    assert alpha(gauss, diag(1), diag(1), 3).value == Fraction(4, 3)
    assert alpha(gauss, diag(1, 1), diag(1, 1), 3).value == Fraction(32, 27)
    assert alpha(gauss, diag(1, 1), diag(1, 3), 3).value == 0


def test_alpha_zero_iff_odd_valuation(diag, gauss):
    for t in ((1, 3), (1, 9), (3, 9), (3, 3), (1, 27), (9, 9)):
        value = alpha(gauss, diag(1, 1), diag(*t), 3).value
        assert (value == 0) == (_v3(t[0] * t[1]) % 2 == 1)


def _v3(x):
    v = 0
    while x % 3 == 0:
        x //= 3
        v += 1
    return v


def test_alpha_witnesses_two_equal_levels(diag, gauss):
    res = alpha(gauss, diag(1, 3), diag(1, 3), 3)
    (k1, v1), (k2, v2) = res.witnesses[-2:]
    assert k2 == k1 + 1 and v1 == v2 == res.value


def test_closed_forms():
    assert mu(0, 1, 7) == 1
    assert mu(1, 2, 3) == 5
    assert mu(0, 3, 11) == 2
    with pytest.raises(BadExponents):
        mu(2, 1, 3)
    with pytest.raises(BadExponents):
        mu(1, 3, 3)
    assert alpha_selfdual(1, 5) == Fraction(6, 5)
    assert alpha_selfdual(2, 3) == Fraction(32, 27)
    assert alpha_selfdual(3, 3) == Fraction(896, 729)
    assert alpha_nearly(2, 3) == Fraction(112, 81)
    assert alpha_nearly(3, 3) == Fraction(8960, 6561)
    with pytest.raises(BadSize):
        alpha_nearly(1, 3)
    assert alpha_reduction_rhs(2, 3) == Fraction(112, 81)
    assert alpha_reduction_rhs(3, 3) == Fraction(8960, 6561)
    assert alpha_reduction_rhs(3, 5) == (1 - Fraction(1, 625)) * Fraction(6, 5) * Fraction(126, 125)


def test_density_polynomial(diag, gauss):
    poly = density_poly(gauss, diag(1), diag(1), 3, deg=2)
    assert poly.at_r(0) == Fraction(4, 3)
    assert poly.at_r(1) == brute_count(gauss, hyperbolic_augment(gauss, diag(1), 1), diag(1), 3, 2).scaled
    assert poly.degree <= 2
    assert poly.at_r(poly.held_out[0]) == poly.held_out[1]


def test_hyperbolic_augment(gauss, diag):
    s = hyperbolic_augment(gauss, diag(1), 2)
    assert s.n == 5 and s.det() == 1


def test_derivative(diag, gauss):
    assert derivative_normalization() == Fraction(-1, 2)
    i2 = diag(1, 1)
    assert alpha_prime(gauss, i2, diag(1, 3), 3) == Fraction(32, 27)
    assert alpha_prime(gauss, i2, diag(3, 9), 3) == Fraction(160, 27)
    assert alpha_prime(gauss, i2, diag(1, 27), 3) == Fraction(64, 27)
    with pytest.raises(NotIncoherentLocal):
        alpha_prime(gauss, i2, diag(3, 3), 3)


def test_other_field(eisenstein_field):
    one = HermitianMatrix.identity(eisenstein_field, 1)
    assert alpha(eisenstein_field, one, one, 5).value == Fraction(6, 5)
    assert brute_count(eisenstein_field, one, one, 5, 2).scaled == Fraction(6, 5)
