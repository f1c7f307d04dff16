from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hermdeg.errors import NonFundamental, NonNegative, UnsupportedCase, ZeroArgument
from hermdeg.quadfield import (
    INERT,
    RAMIFIED,
    SPLIT,
    class_number_by_closure,
    hilbert_chi,
    is_fundamental,
    make_field,
    moduli_component_count,
    norm,
    splitting,
)


@pytest.mark.parametrize(
    "delta,ramified,h,w",
    [(-4, 1, 1, 4), (-3, 1, 1, 6), (-15, 2, 2, 2), (-23, 1, 3, 2), (-20, 2, 2, 2), (-163, 1, 1, 2)],
)
def test_field_constants(delta, ramified, h, w):
    ctx = make_field(delta)
    assert (ctx.num_ramified, ctx.h, ctx.w) == (ramified, h, w)


@pytest.mark.parametrize("delta", [-3, -4, -7, -15, -20, -23, -84, -163, -1155])
def test_class_number_agrees_with_ideal_closure(delta):
    assert make_field(delta).h == class_number_by_closure(delta)


def test_rejects_bad_discriminants():
    with pytest.raises(NonNegative):
        make_field(5)
    with pytest.raises(NonFundamental):
        make_field(-16)
    with pytest.raises(NonFundamental):
        make_field(-12)
    assert not is_fundamental(-8 * 4)


def test_splitting(gauss):
    assert splitting(gauss, 5) == SPLIT
    assert splitting(gauss, 3) == INERT
    assert splitting(gauss, 2) == RAMIFIED


def test_hilbert_chi_examples(gauss):
    assert hilbert_chi(gauss, 1, 3) == 1
    assert hilbert_chi(gauss, 3, 3) == -1
    assert hilbert_chi(gauss, -1, "inf") == -1
    with pytest.raises(ZeroArgument):
        hilbert_chi(gauss, 0, 3)


def test_norms(gauss, eisenstein_field):
    # omega = -2 + i, so i = 2 + omega
    i = gauss.elt(2, 1)
    assert i * i == gauss.elt(-1)
    assert norm(gauss, gauss.elt(2) + i) == 5
    assert norm(gauss, gauss.zero) == 0
    # omega = (-3 + sqrt(-3)) / 2 has norm (9 + 3) / 4
    assert norm(eisenstein_field, eisenstein_field.omega) == 3


def test_unit_groups():
    assert len(make_field(-4).units()) == 4
    assert len(make_field(-3).units()) == 6
    assert len(make_field(-23).units()) == 2


def test_moduli_component_count():
    assert moduli_component_count(make_field(-23), 3) == 3
    assert moduli_component_count(make_field(-15), 2) == 1
    assert moduli_component_count(make_field(-4), 2, exceptional_2adic=True) == 1
    with pytest.raises(UnsupportedCase):
        moduli_component_count(make_field(-4), 1)
    with pytest.raises(UnsupportedCase):
        moduli_component_count(make_field(-15), 2, exceptional_2adic=True)


def test_inert_primes_have_chi_minus_one(gauss):
    for p in (3, 5, 7, 11, 13, 17, 19, 23):
        assert (splitting(gauss, p) == INERT) == (hilbert_chi(gauss, p, p) == -1)


elements = st.tuples(st.integers(-50, 50), st.integers(-50, 50))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([-3, -4, -7, -15, -23, -20]), elements, elements)
def test_norm_is_multiplicative(delta, x, y):
    ctx = make_field(delta)
    a, b = ctx.elt(*x), ctx.elt(*y)
    assert norm(ctx, a * b) == norm(ctx, a) * norm(ctx, b)
    assert norm(ctx, a) >= 0
    assert a * a.conj() == ctx.elt(norm(ctx, a))
