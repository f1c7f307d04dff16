from fractions import Fraction

import pytest

from hermdeg.eisenstein import (
    coefficient_report,
    gamma_unit,
    l_factor_inv,
    volume_ratio,
    whittaker0,
    whittaker_prime,
)
from hermdeg.errors import NotNondegenerate, UnsupportedLocale
from hermdeg.hermitian import space_invariants


def test_gamma_sign(gauss, diag):
    assert gamma_unit(gauss, space_invariants(gauss, diag(1, 1)), 3) == 1
    assert gamma_unit(gauss, space_invariants(gauss, diag(1, 3)), 3) == -1
    with pytest.raises(UnsupportedLocale):
        gamma_unit(gauss, space_invariants(gauss, diag(1, 1)), 2)


def test_l_factor():
    assert l_factor_inv(1, 3) == Fraction(4, 3)
    assert l_factor_inv(2, 3) == Fraction(32, 27)
    assert l_factor_inv(3, 5) == Fraction(18144, 15625)


def test_whittaker_at_centre(gauss, diag):
    assert whittaker0(gauss, diag(1, 3), diag(1, 1), 3).rational_part == 0
    w = whittaker0(gauss, diag(1, 1), diag(1, 1), 3)
    assert (w.rational_part, w.gamma_power) == (Fraction(32, 27), 1)
    assert whittaker0(gauss, diag(1, 3), diag(1, 3), 3).rational_part == Fraction(16, 27)


def test_whittaker_derivative(gauss, diag):
    w = whittaker_prime(gauss, diag(1, 3), 3)
    assert (w.rational_part, w.log_p_power) == (Fraction(32, 27), 1)
    assert w.to_json()["times"] == ["log_p"]
    assert whittaker_prime(gauss, diag(3, 9), 3).rational_part == Fraction(160, 27)
    with pytest.raises(NotNondegenerate):
        whittaker_prime(gauss, diag(3, 3), 3)


def test_volume_ratio():
    assert volume_ratio(1, 3) == Fraction(1, 3)
    assert volume_ratio(2, 3) == Fraction(7, 54)
    assert volume_ratio(3, 3) == Fraction(10, 243)


def test_report_statuses(gauss, diag):
    assert coefficient_report(gauss, diag(3, 7)).status == "vanishes_identically"
    rep = coefficient_report(gauss, diag(1, 1))
    assert rep.status == "ramified_support"
    assert "mu" not in rep.to_json()


@pytest.mark.parametrize(
    "entries,mu_value,arith",
    [((1, 3), 1, Fraction(1, 4)), ((3, 9), 5, Fraction(5, 4)), ((1, 27), 2, Fraction(1, 2))],
)
def test_inert_reports(gauss, diag, entries, mu_value, arith):
    rep = coefficient_report(gauss, diag(*entries))
    assert rep.status == "inert_case" and rep.p == 3
    assert rep.mu == mu_value
    assert rep.r_gen_lprime == 1
    assert rep.arithmetic_degree == arith
    assert rep.normalized_coefficient / rep.arithmetic_degree == 4
    assert [g.lattice_type for g in rep.genera] == ["I", "II"]
    assert rep.genera[1].r_gen == 0
