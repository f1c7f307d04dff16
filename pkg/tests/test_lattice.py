from fractions import Fraction

import pytest

from hermdeg.errors import BadPrime, CapExceeded, IndefiniteForm, Infeasible, NotRamifiedAt2
from hermdeg.hermitian import HermitianMatrix
from hermdeg.lattice import (
    HermitianLattice,
    aut_group,
    default_aux_primes,
    dual_index,
    dual_lattice,
    fincke_pohst,
    genus_enumerate,
    isometric,
    lattice_type_at_2,
    lll_gram,
    nearly_selfdual_in,
    neighbors,
    rep_count,
    selfdual_status,
    standard_lattice,
)
from hermdeg.quadfield import make_field


def test_dual_and_index(gauss, diag):
    lat = standard_lattice(gauss, diag(1, 3))
    dual = dual_lattice(lat)
    assert dual.contains_lattice(lat)
    assert dual_index(lat) == 9
    assert dual_lattice(dual) == lat


def test_short_vectors(gauss, diag):
    lat = standard_lattice(gauss, diag(1, 1))
    assert len(lat.short_vectors(1)) == 8
    assert len(lat.short_vectors(2)) == 24
    assert lat.short_vectors(0) == []


def test_status(gauss, diag):
    assert selfdual_status(standard_lattice(gauss, diag(1, 1))).kind == "selfdual"
    status = selfdual_status(standard_lattice(gauss, diag(1, 3)))
    assert (status.kind, status.p, status.quotient_shape) == ("nearly", 3, (3, 3))
    assert selfdual_status(standard_lattice(gauss, diag(1, 9))).kind == "other"


def test_automorphisms(gauss, diag):
    assert aut_group(standard_lattice(gauss, diag(1))).order == 4
    assert aut_group(standard_lattice(gauss, diag(1, 1))).order == 32
    assert aut_group(standard_lattice(gauss, diag(1, 3))).order == 16


def test_isometry(gauss, diag):
    ok, m = isometric(standard_lattice(gauss, diag(1, 3)), standard_lattice(gauss, diag(3, 1)))
    assert ok and m is not None
    assert isometric(standard_lattice(gauss, diag(1, 1)), standard_lattice(gauss, diag(1, 3)))[0] is False


def test_indefinite_rejected(gauss, diag):
    with pytest.raises(IndefiniteForm):
        standard_lattice(gauss, diag(1, -1)).short_vectors(2)
    with pytest.raises(IndefiniteForm):
        lll_gram([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(-1)]])


def test_fincke_pohst_counts():
    q = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(2)]]
    assert len([c for c in fincke_pohst(q, Fraction(2)) if any(c)]) == 6


def test_neighbors(gauss, diag):
    lat = standard_lattice(gauss, diag(1, 1))
    nbrs = neighbors(lat, 5)
    assert len(nbrs) == 6
    for m in nbrs:
        assert selfdual_status(m).kind == "selfdual"
        assert m.volume == lat.volume
        assert m.is_integral()
    near = neighbors(standard_lattice(gauss, diag(1, 3)), 13)
    assert len(near) == 14
    assert {selfdual_status(m).kind for m in near} == {"nearly"}
    assert neighbors(standard_lattice(gauss, diag(1)), 5) == []


def test_neighbors_reject_bad_primes(gauss, diag):
    with pytest.raises(BadPrime):
        neighbors(standard_lattice(gauss, diag(1, 1)), 3)
    with pytest.raises(BadPrime):
        neighbors(standard_lattice(gauss, diag(1, 1)), 2)


@pytest.mark.parametrize("entries,mass,aut", [((1,), Fraction(1, 4), 4), ((1, 1), Fraction(1, 32), 32), ((1, 3), Fraction(1, 16), 16)])
def test_genus(gauss, diag, entries, mass, aut):
    lat = standard_lattice(gauss, diag(*entries))
    rec = genus_enumerate(lat)
    assert rec.mass == mass
    assert rec.aut_orders == (aut,)
    assert len(rec.classes) == 1
    assert rec.aux_primes == tuple(default_aux_primes(lat))
    assert rep_count(diag(*entries), lat) == aut


def test_genus_cap(gauss, diag):
    with pytest.raises(CapExceeded):
        genus_enumerate(standard_lattice(gauss, diag(1, 1)), class_cap=0)


def test_rep_count_small(gauss, diag):
    lat = standard_lattice(gauss, diag(1, 1))
    assert rep_count(diag(1), lat) == 8
    assert rep_count(diag(2), lat) == 24


def test_nearly_selfdual_construction(gauss, diag):
    built = nearly_selfdual_in(gauss, diag(1, 27), 3)
    assert selfdual_status(built).kind == "nearly"
    assert isometric(built, standard_lattice(gauss, diag(1, 3)))[0]
    assert nearly_selfdual_in(gauss, diag(1, 3), 3) == standard_lattice(gauss, diag(1, 3))
    with pytest.raises(Infeasible):
        nearly_selfdual_in(gauss, diag(1, 1), 3)


def test_type_at_two(gauss, diag):
    assert lattice_type_at_2(standard_lattice(gauss, diag(1, 1))) == "I"
    hyperbolic = HermitianMatrix.from_pairs(gauss, [[[0, 0], [1, 0]], [[1, 0], [0, 0]]])
    assert lattice_type_at_2(standard_lattice(gauss, hyperbolic)) == "II"
    with pytest.raises(NotRamifiedAt2):
        lattice_type_at_2(standard_lattice(make_field(-3), HermitianMatrix.identity(make_field(-3), 2)))


def test_from_vectors_requires_full_rank(gauss, diag):
    from hermdeg.errors import InvalidInput

    with pytest.raises(InvalidInput):
        HermitianLattice.from_vectors(gauss, diag(1, 1), [(gauss.elt(1, 0), gauss.elt(0, 0))])
