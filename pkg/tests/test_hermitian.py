from fractions import Fraction

import pytest

from hermdeg.errors import EvenPrime, NotInert, ProductFormulaViolation, SingularMatrix, SymmetryError
from hermdeg.hermitian import (
    HermitianMatrix,
    det_class,
    diff_sets,
    enumerate_relevant_spaces,
    landherr,
    local_jordan_inert,
    nondegeneracy_report,
    relevant_space_count,
    space_invariants,
    strict_similarity_classes,
)
from hermdeg.quadfield import make_field


def gauss_i_matrix(ctx):
    i, minus_i = ctx.elt(2, 1), ctx.elt(-2, -1)
    return HermitianMatrix([[ctx.elt(2), i], [minus_i, ctx.elt(2)]], ctx.delta)


def test_symmetry_is_enforced(gauss):
    with pytest.raises(SymmetryError):
        HermitianMatrix.from_pairs(gauss, [[[1, 0], [0, 1]], [[0, 1], [3, 0]]])
    with pytest.raises(SymmetryError):
        HermitianMatrix.from_pairs(gauss, [[[1, 1], [0, 0]], [[0, 0], [1, 0]]])


def test_determinants(gauss, diag):
    assert det_class(diag(1, 3)) == 3
    assert det_class(HermitianMatrix.identity(gauss, 3)) == 1
    assert det_class(HermitianMatrix.from_pairs(gauss, [[[3, 0], [1, 0]], [[1, 0], [3, 0]]])) == 8
    assert det_class(gauss_i_matrix(gauss)) == 3


def test_space_invariants(gauss, diag):
    inv = space_invariants(gauss, diag(1, 3))
    assert inv.sig == (2, 0)
    assert inv.inv[3] == -1
    assert all(s == 1 for p, s in inv.inv.items() if p not in (2, 3))
    assert space_invariants(gauss, diag(1, -1)).sig == (1, 1)
    twisted = space_invariants(gauss, gauss_i_matrix(gauss))
    assert twisted.sig == (2, 0) and twisted.inv[3] == -1
    with pytest.raises(SingularMatrix):
        space_invariants(gauss, diag(1, 0))


def test_product_formula_for_invariants(gauss, diag):
    for t in (diag(1, 3), diag(3, 7), diag(1, -5), diag(2, 6, 11)):
        inv = space_invariants(gauss, t)
        prod = 1
        for s in inv.inv.values():
            prod *= s
        assert prod * (-1) ** inv.sig[1] == 1


def test_diff_sets(gauss, diag):
    assert diff_sets(gauss, diag(1, 3)).diff0 == [3]
    assert diff_sets(gauss, diag(3, 7)).diff0 == [3, 7]
    assert diff_sets(gauss, diag(1, 1)).diff0 == []
    # against the incoherent companion space, |Diff(T, V)| is odd for positive definite T
    for t in (diag(1, 3), diag(3, 7), diag(1, 1), diag(1, 5), diag(2, 3)):
        assert len(diff_sets(gauss, t).diff_v) % 2 == 1


def test_local_jordan(gauss, diag):
    assert local_jordan_inert(gauss, diag(1, 3), 3).exponents == (0, 1)
    square = HermitianMatrix.from_pairs(gauss, [[[3, 0], [1, 0]], [[1, 0], [3, 0]]])
    assert local_jordan_inert(gauss, square, 3).exponents == (0, 0)
    with pytest.raises(NotInert):
        local_jordan_inert(gauss, diag(1, 3), 5)
    with pytest.raises(EvenPrime):
        local_jordan_inert(gauss, diag(1, 3), 2)


def test_jordan_off_diagonal_pivot(gauss):
    # all diagonal entries divisible by 3, a unit off the diagonal
    t = HermitianMatrix.from_pairs(gauss, [[[3, 0], [1, 0]], [[1, 0], [6, 0]]])
    assert local_jordan_inert(gauss, t, 3).exponents == (0, 0)


def test_nondegeneracy(gauss, diag):
    r = nondegeneracy_report(gauss, diag(1, 1, 3), 3)
    assert (r.nondeg, r.a, r.b, r.r0, r.predicted_dim) == (True, 0, 1, 1, 0)
    r = nondegeneracy_report(gauss, diag(3, 3, 3), 3)
    assert (r.nondeg, r.r0, r.predicted_dim) == (False, 3, 1)
    r = nondegeneracy_report(gauss, diag(1, 3, 9), 3)
    assert (r.nondeg, r.a, r.b) == (True, 1, 2)


def test_relevant_spaces():
    for delta, n, count, strict in ((-4, 2, 1, 1), (-15, 2, 2, 2), (-15, 3, 2, 1), (-84, 2, 4, 4), (-84, 3, 4, 1)):
        ctx = make_field(delta)
        got = relevant_space_count(ctx, n, (n - 1, 1))
        assert got == {"count": count, "strict_sim_count": strict}
        assert len(enumerate_relevant_spaces(ctx, n, (n - 1, 1))) == count
        assert len(strict_similarity_classes(ctx, n, (n - 1, 1))) == strict


def test_landherr(gauss):
    res = landherr(gauss, 2, (1, 1), {3: -1})
    assert not res.self_dual_feasible
    with pytest.raises(ProductFormulaViolation):
        landherr(gauss, 2, (2, 0), {3: -1})
    ctx = make_field(-15)
    res = landherr(ctx, 2, (2, 0), {3: -1, 5: -1})
    assert res.invariants.local_inv(ctx, 3) == -1 and res.invariants.local_inv(ctx, 5) == -1
    assert res.self_dual_feasible
