"""Hermitian O_k-lattices given by Z-bases inside k^n.

A vector of k^n is a tuple of ``KElement``; its rational coordinates are
``(a_1, b_1, ..., a_n, b_n)`` for ``sum (a_i + b_i*omega) e_i``.  A lattice is
stored as the Hermite normal form of a Z-basis in those coordinates, which
makes equality and containment exact and canonical without pseudo-bases, so
non-free lattices need no special treatment.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

import numpy as np
from sympy import Matrix, isprime
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors

from .errors import (
    BadPrime,
    CapExceeded,
    IndefiniteForm,
    Infeasible,
    InvalidInput,
    NotRamifiedAt2,
    RankMismatch,
    SingularMatrix,
    UnsupportedCase,
    UnsupportedLocale,
)
from .hermitian import HermitianMatrix, det_class, require_odd_inert, signature, vp_rational
from .quadfield import FieldContext, KElement, kronecker

Vec = tuple  # tuple of KElement
QVec = tuple  # tuple of Fraction, length 2n


# ---------------------------------------------------------------------------
# rational linear algebra


def frac_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [m[r][j] - f * m[c][j] for j in range(n)]
    return det


def frac_inverse(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    m = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise SingularMatrix("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [m[r][j] - f * m[c][j] for j in range(2 * n)]
    return [r[n:] for r in m]


def vec_mat(v: Sequence, m: Sequence[Sequence]) -> list:
    return [sum((v[i] * m[i][j] for i in range(len(v))), Fraction(0)) for j in range(len(m[0]))]


def hnf_basis(gens: Iterable[Sequence[Fraction]], dim: int) -> tuple[QVec, ...]:
    """Canonical Z-basis (Hermite normal form) of the Z-span of rational vectors."""
    gens = [tuple(map(Fraction, g)) for g in gens]
    gens = [g for g in gens if any(g)]
    if not gens:
        raise SingularMatrix("zero module")
    d = 1
    for g in gens:
        for x in g:
            d = lcm(d, x.denominator)
    cols = Matrix([[int(x * d) for x in g] for g in gens]).T
    h = hermite_normal_form(cols)
    basis = [tuple(Fraction(int(h[i, j]), d) for i in range(dim)) for j in range(h.shape[1])]
    return tuple(basis)


def _nullspace_mod(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of {c in F_p^ncols : rows . c = 0}."""
    m = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(m[i][j] - f * m[r][j]) % p for j in range(ncols)]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-m[i][f]) % p
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# vectors of k^n


def qvec_of(v: Vec) -> QVec:
    out = []
    for x in v:
        out += [x.a, x.b]
    return tuple(out)


def vec_of(ctx: FieldContext, c: Sequence[Fraction]) -> Vec:
    return tuple(ctx.elt(c[2 * i], c[2 * i + 1]) for i in range(len(c) // 2))


def herm(gram: HermitianMatrix, x: Vec, y: Vec) -> KElement:
    """h(x, y) = x G conj(y)^t: linear in x, conjugate-linear in y."""
    n = gram.n
    acc = x[0] * 0
    for i in range(n):
        if x[i].is_zero():
            continue
        row = x[0] * 0
        for j in range(n):
            row = row + gram.rows[i][j] * y[j].conj()
        acc = acc + x[i] * row
    return acc


def _omega_times(delta: int, c: QVec) -> QVec:
    nw = Fraction(delta * delta - delta, 4)
    out = []
    for i in range(0, len(c), 2):
        a, b = c[i], c[i + 1]
        out += [-nw * b, a + delta * b]
    return tuple(out)


def kmat_inverse(m: Sequence[Sequence[KElement]]) -> list[list[KElement]]:
    n = len(m)
    one = m[0][0] * 0 + 1
    zero = m[0][0] * 0
    a = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not a[r][c].is_zero()), None)
        if piv is None:
            raise SingularMatrix("matrix is singular over k")
        a[c], a[piv] = a[piv], a[c]
        inv = a[c][c].inverse()
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and not a[r][c].is_zero():
                f = a[r][c]
                a[r] = [a[r][j] - f * a[c][j] for j in range(2 * n)]
    return [r[n:] for r in a]


def kvec_mat(v: Vec, m) -> Vec:
    n = len(m[0])
    zero = v[0] * 0
    return tuple(sum((v[i] * m[i][j] for i in range(len(v))), zero) for j in range(n))


def _k_independent(vs: list[Vec]) -> bool:
    """Whether the vectors are linearly independent over k (rank by elimination)."""
    rows = [list(v) for v in vs]
    n = len(rows[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        for i in range(r + 1, len(rows)):
            if not rows[i][c].is_zero():
                f = rows[i][c] * inv
                rows[i] = [rows[i][j] - f * rows[r][j] for j in range(n)]
        r += 1
    return r == len(rows)


# ---------------------------------------------------------------------------
# lattices


class HermitianLattice:
    """An O_k-stable Z-lattice of full rank 2n in k^n with an ambient hermitian form."""

    def __init__(self, ctx: FieldContext, gram: HermitianMatrix, gens: Iterable[Sequence[Fraction]]):
        self.ctx = ctx
        self.gram = gram
        n = gram.n
        basis = hnf_basis(list(gens), 2 * n)
        if len(basis) != 2 * n:
            raise InvalidInput(f"generators span rank {len(basis)}, expected {2 * n}")
        self.basis = basis
        for z in basis:
            if not self.contains_q(_omega_times(ctx.delta, z)):
                raise InvalidInput("generating set is not stable under multiplication by omega")

    @classmethod
    def from_vectors(cls, ctx, gram, vectors: Iterable[Vec]) -> "HermitianLattice":
        """The O_k-span of the given vectors of k^n."""
        gens = []
        for v in vectors:
            q = qvec_of(v)
            gens += [q, _omega_times(ctx.delta, q)]
        return cls(ctx, gram, gens)

    @property
    def n(self) -> int:
        return self.gram.n

    def __eq__(self, other):
        return isinstance(other, HermitianLattice) and self.basis == other.basis and self.gram == other.gram

    def __hash__(self):
        return hash(self.basis)

    def to_json(self) -> dict:
        from .io import lattice_to_json

        return lattice_to_json(self)

    def __repr__(self):
        return f"HermitianLattice(n={self.n}, basis={[[str(x) for x in b] for b in self.basis]})"

    @cached_property
    def _basis_inverse(self):
        return frac_inverse(self.basis)

    def coords(self, q: QVec) -> list[Fraction]:
        """Coordinates of an ambient rational vector in the Z-basis."""
        return vec_mat(list(q), self._basis_inverse)

    def contains_q(self, q: QVec) -> bool:
        return all(c.denominator == 1 for c in self.coords(q))

    def contains(self, v: Vec) -> bool:
        return self.contains_q(qvec_of(v))

    def contains_lattice(self, other: "HermitianLattice") -> bool:
        return all(self.contains_q(z) for z in other.basis)

    @cached_property
    def zgens(self) -> tuple[Vec, ...]:
        return tuple(vec_of(self.ctx, z) for z in self.basis)

    @cached_property
    def covolume(self) -> Fraction:
        return abs(frac_det(self.basis))

    @cached_property
    def volume(self) -> Fraction:
        """Determinant of the trace form on the Z-basis: an isometry invariant."""
        return frac_det(self.qform)

    @cached_property
    def zgram(self) -> list[list[KElement]]:
        """h(z_i, z_j) for the Z-basis."""
        zs = self.zgens
        return [[herm(self.gram, a, b) for b in zs] for a in zs]

    @cached_property
    def qform(self) -> list[list[Fraction]]:
        """The Z-quadratic form c -> h(x, x) for x = sum c_i z_i."""
        g = self.zgram
        r = len(g)
        return [[g[i][j].trace() / 2 for j in range(r)] for i in range(r)]

    def vector(self, c: Sequence[int]) -> Vec:
        q = [Fraction(0)] * (2 * self.n)
        for ci, z in zip(c, self.basis):
            if ci:
                q = [a + ci * b for a, b in zip(q, z)]
        return vec_of(self.ctx, q)

    def h_coeffs(self, c: Sequence[int], d: Sequence[int]) -> KElement:
        g = self.zgram
        acc = self.ctx.zero
        for i, ci in enumerate(c):
            if not ci:
                continue
            for j, dj in enumerate(d):
                if dj:
                    acc = acc + g[i][j] * (ci * dj)
        return acc

    def is_integral(self) -> bool:
        return all(x.is_integral() for r in self.zgram for x in r)

    @cached_property
    def _positive(self) -> bool:
        return signature(self.gram) == (self.n, 0)

    def require_definite(self) -> None:
        if not self._positive:
            raise IndefiniteForm("the hermitian form must be positive definite")

    # -- short vectors -----------------------------------------------------

    def vectors_up_to(self, bound) -> dict:
        """Coefficient vectors c != 0 with h(x, x) <= bound, bucketed by the norm value."""
        self.require_definite()
        bound = Fraction(bound)
        cache = self.__dict__.setdefault("_sv_cache", {})
        for b, table in cache.items():
            if b >= bound:
                return {t: v for t, v in table.items() if t <= bound}
        u, reduced = self.reduced_form
        r = len(u)
        table: dict = {}
        for cr in fincke_pohst(reduced, bound):
            c = tuple(sum(cr[i] * u[i][j] for i in range(r)) for j in range(r))
            table.setdefault(_qeval(reduced, cr), []).append(c)
        for t in table:
            table[t].sort()
        cache[bound] = table
        return table

    @cached_property
    def reduced_form(self):
        """(U, Q') with Q' = U Q U^t LLL-reduced; rows of U are coefficient vectors."""
        self.require_definite()
        return lll_gram(self.qform)

    @property
    def reduced_bound(self) -> Fraction:
        """Largest diagonal entry of the reduced form: enough vectors to span L."""
        q = self.reduced_form[1]
        return max(q[i][i] for i in range(len(q)))

    def short_vectors(self, t) -> list[Vec]:
        t = Fraction(t)
        if t <= 0:
            return []
        return [self.vector(c) for c in self.vectors_up_to(t).get(t, [])]


def _qeval(q, c) -> Fraction:
    r = len(c)
    return sum(q[i][j] * c[i] * c[j] for i in range(r) for j in range(r) if c[i] and c[j])


def lll_gram(q: Sequence[Sequence[Fraction]], delta: Fraction = Fraction(3, 4)):
    """Exact LLL reduction of a positive definite Gram matrix."""
    r = len(q)
    g = [list(map(Fraction, row)) for row in q]
    u = [[int(i == j) for j in range(r)] for i in range(r)]

    def gso():
        mu = [[Fraction(0)] * r for _ in range(r)]
        bn = [Fraction(0)] * r
        for i in range(r):
            for j in range(i):
                mu[i][j] = (g[i][j] - sum((mu[j][t] * mu[i][t] * bn[t] for t in range(j)), Fraction(0))) / bn[j]
            bn[i] = g[i][i] - sum((mu[i][t] ** 2 * bn[t] for t in range(i)), Fraction(0))
            if bn[i] <= 0:
                raise IndefiniteForm("Gram matrix is not positive definite")
        return mu, bn

    def sub(k, j, c):
        # b_k -= c b_j
        u[k] = [a - c * b for a, b in zip(u[k], u[j])]
        gkj = g[k][j]
        for t in range(r):
            if t != k:
                g[k][t] -= c * g[j][t]
                g[t][k] = g[k][t]
        g[k][k] += -2 * c * gkj + c * c * g[j][j]

    k = 1
    while k < r:
        for j in range(k - 1, -1, -1):
            mu, _ = gso()
            c = round(mu[k][j])
            if c:
                sub(k, j, c)
        mu, bn = gso()
        if bn[k] >= (delta - mu[k][k - 1] ** 2) * bn[k - 1]:
            k += 1
        else:
            u[k], u[k - 1] = u[k - 1], u[k]
            g[k], g[k - 1] = g[k - 1], g[k]
            for row in g:
                row[k], row[k - 1] = row[k - 1], row[k]
            k = max(k - 1, 1)
    return u, g


def fincke_pohst(q: list[list[Fraction]], bound: Fraction) -> list[tuple[int, ...]]:
    """All nonzero integer vectors c with c^t Q c <= bound, by exact LDL enumeration."""
    r = len(q)
    a = [list(map(Fraction, row)) for row in q]
    d = [Fraction(0)] * r
    mu = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise IndefiniteForm("quadratic form is not positive definite")
        for j in range(i + 1, r):
            mu[i][j] = a[i][j] / d[i]
        for j in range(i + 1, r):
            for k in range(i + 1, r):
                a[j][k] -= mu[i][j] * mu[i][k] * d[i]
    out = []
    c = [0] * r

    def rec(i: int, remaining: Fraction):
        if i < 0:
            if any(c):
                out.append(tuple(c))
            return
        center = -sum((mu[i][j] * c[j] for j in range(i + 1, r)), Fraction(0))
        lim = remaining / d[i]
        x0 = round(center)
        if (x0 - center) ** 2 > lim:
            return
        lo = x0
        while (lo - 1 - center) ** 2 <= lim:
            lo -= 1
        hi = x0
        while (hi + 1 - center) ** 2 <= lim:
            hi += 1
        for x in range(lo, hi + 1):
            c[i] = x
            rec(i - 1, remaining - d[i] * (x - center) ** 2)
        c[i] = 0

    rec(r - 1, Fraction(bound))
    return out


def standard_lattice(ctx: FieldContext, t: HermitianMatrix) -> HermitianLattice:
    if det_class(t) == 0:
        raise SingularMatrix("det T = 0")
    n = t.n
    gens = []
    for i in range(n):
        for coord in ((1, 0), (0, 1)):
            v = [Fraction(0)] * (2 * n)
            v[2 * i], v[2 * i + 1] = map(Fraction, coord)
            gens.append(v)
    return HermitianLattice(ctx, t, gens)


def dual_lattice(lat: HermitianLattice) -> HermitianLattice:
    """{x in k^n : h(x, L) in O_k}."""
    if det_class(lat.gram) == 0:
        raise SingularMatrix("degenerate ambient form")
    ctx, n = lat.ctx, lat.n
    # functionals x -> a- and b-coordinates of h(x, z_j), as rows over the ambient Q-coordinates
    funcs = []
    units = [vec_of(ctx, [Fraction(int(i == j)) for j in range(2 * n)]) for i in range(2 * n)]
    for z in lat.zgens:
        vals = [herm(lat.gram, u, z) for u in units]
        funcs.append([v.a for v in vals])
        funcs.append([v.b for v in vals])
    # x is in the dual iff F x is integral, so the dual is the dot-product dual of span(F)
    span = hnf_basis(funcs, 2 * n)
    dual_rows = [list(r) for r in zip(*frac_inverse(span))]
    return HermitianLattice(ctx, lat.gram, dual_rows)


def quotient_invariants(big: HermitianLattice, small: HermitianLattice) -> list[int]:
    """Elementary divisors (> 1) of big/small, for small contained in big."""
    if not big.contains_lattice(small):
        raise InvalidInput("not a sublattice")
    rel = [[int(c) for c in big.coords(z)] for z in small.basis]
    return [int(d) for d in invariant_factors(Matrix(rel)) if abs(int(d)) != 1]


@dataclass(frozen=True)
class SelfDualStatus:
    kind: str
    p: Optional[int]
    quotient_shape: tuple[int, ...]

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": self.p, "quotient_shape": list(self.quotient_shape)}


def selfdual_status(lat: HermitianLattice) -> SelfDualStatus:
    dual = dual_lattice(lat)
    if not dual.contains_lattice(lat):
        return SelfDualStatus("other", None, ())
    shape = tuple(sorted(quotient_invariants(dual, lat)))
    if not shape:
        return SelfDualStatus("selfdual", None, shape)
    if len(shape) == 2 and shape[0] == shape[1] and isprime(shape[0]):
        p = shape[0]
        if kronecker(lat.ctx.delta, p) == -1 or _cyclic_over_ok(lat, dual, p):
            return SelfDualStatus("nearly", p, shape)
    return SelfDualStatus("other", None, shape)


def _cyclic_over_ok(lat: HermitianLattice, dual: HermitianLattice, p: int) -> bool:
    """Whether dual/lat (of order p^2) is generated by one element as an O_k-module."""
    for z in dual.basis:
        m = hnf_basis(list(lat.basis) + [z, _omega_times(lat.ctx.delta, z)], 2 * lat.n)
        if m == dual.basis:
            return True
    # a generator need not be a basis vector; try small combinations
    for coeffs in product(range(p), repeat=len(dual.basis)):
        if not any(coeffs):
            continue
        z = tuple(sum((c * b[i] for c, b in zip(coeffs, dual.basis)), Fraction(0)) for i in range(2 * lat.n))
        m = hnf_basis(list(lat.basis) + [z, _omega_times(lat.ctx.delta, z)], 2 * lat.n)
        if m == dual.basis:
            return True
    return False


# ---------------------------------------------------------------------------
# isometries


def _kbasis_from_short(lat: HermitianLattice) -> list[tuple[Fraction, tuple[int, ...]]]:
    """n vectors of L, independent over k, chosen greedily by ascending norm."""
    table = lat.vectors_up_to(lat.reduced_bound)
    chosen: list = []
    for t in sorted(table):
        for c in sorted(table[t]):
            cand = [lat.vector(x) for _, x in chosen] + [lat.vector(c)]
            if _k_independent(cand):
                chosen.append((t, c))
                if len(chosen) == lat.n:
                    return chosen
    raise ArithmeticError("could not find a k-basis among short vectors")


def _isometries(l1: HermitianLattice, l2: HermitianLattice, first_only: bool):
    """Yield the matrices M (x -> x M on row vectors) with M(L1) = L2 preserving the forms."""
    if l1.n != l2.n:
        raise RankMismatch("lattices have different ranks")
    l1.require_definite()
    l2.require_definite()
    if l1.volume != l2.volume:
        return
    src = _kbasis_from_short(l1)
    n = l1.n
    vs = [l1.vector(c) for _, c in src]
    vinv = kmat_inverse(vs)
    gram_v = [[herm(l1.gram, a, b) for b in vs] for a in vs]
    table = l2.vectors_up_to(max(t for t, _ in src))
    cands = [[l2.vector(c) for c in table.get(t, [])] for t, _ in src]
    chosen: list = []

    def rec(i):
        if i == n:
            m = [[sum((vinv[r][s] * chosen[s][c] for s in range(n)), l1.ctx.zero) for c in range(n)] for r in range(n)]
            imgs = [kvec_mat(z, m) for z in l1.zgens]
            if all(l2.contains(w) for w in imgs):
                sub = HermitianLattice(l2.ctx, l2.gram, [qvec_of(w) for w in imgs])
                if sub.covolume == l2.covolume:
                    yield m
            return
        for w in cands[i]:
            if all(herm(l2.gram, w, chosen[j]) == gram_v[i][j] for j in range(i)):
                chosen.append(w)
                yield from rec(i + 1)
                chosen.pop()

    for m in rec(0):
        yield m
        if first_only:
            return


@dataclass(frozen=True)
class AutGroup:
    order: int
    generators: tuple

    def to_json(self) -> dict:
        from .io import element_to_json

        return {
            "order": self.order,
            "generators": [[[element_to_json(x) for x in row] for row in g] for g in self.generators],
        }


def _mat_key(m) -> tuple:
    return tuple((x.a, x.b) for row in m for x in row)


def _kmat_mul(a, b):
    n = len(a)
    zero = a[0][0] * 0
    return [[sum((a[i][t] * b[t][j] for t in range(n)), zero) for j in range(n)] for i in range(n)]


def aut_group(lat: HermitianLattice) -> AutGroup:
    elems = list(_isometries(lat, lat, first_only=False))
    # a small generating set: add elements until the generated group is everything
    keys = {_mat_key(m) for m in elems}
    gens: list = []
    group = set()
    ident = [[lat.ctx.one if i == j else lat.ctx.zero for j in range(lat.n)] for i in range(lat.n)]
    group.add(_mat_key(ident))
    members = [ident]
    for m in sorted(elems, key=_mat_key):
        if _mat_key(m) in group:
            continue
        gens.append(m)
        frontier = list(members)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = _kmat_mul(x, g)
                    ky = _mat_key(y)
                    if ky not in group:
                        group.add(ky)
                        members.append(y)
                        nxt.append(y)
            frontier = nxt
        if len(group) == len(keys):
            break
    return AutGroup(order=len(elems), generators=tuple(gens))


def isometric(l1: HermitianLattice, l2: HermitianLattice):
    """(True, witness) if an O_k-linear isometry maps L1 onto L2, else (False, None)."""
    if l1.n != l2.n:
        raise RankMismatch("lattices have different ranks")
    if l1.volume != l2.volume:
        return False, None
    for m in _isometries(l1, l2, first_only=True):
        return True, m
    return False, None


# ---------------------------------------------------------------------------
# neighbours and genera


def split_root(ctx: FieldContext, ell: int) -> int:
    """A root r of x^2 - D x + (D^2 - D)/4 mod ell, so that (ell, omega - r) is prime."""
    nw = ctx.omega_norm
    for r in range(ell):
        if (r * r - ctx.delta * r + nw) % ell == 0:
            return r
    raise BadPrime(f"{ell} does not split")


def neighbors(lat: HermitianLattice, ell: int) -> list[HermitianLattice]:
    """Kneser neighbours at the split prime ell: M = {y : h(y, x) in ell O} + O x / ell."""
    ctx = lat.ctx
    if not isprime(ell) or kronecker(ctx.delta, ell) != 1:
        raise BadPrime(f"{ell} is not a split prime")
    dual = dual_lattice(lat)
    if not dual.contains_lattice(lat):
        raise BadPrime("lattice is not integral")
    index = dual_index(lat, dual)
    if (2 * ctx.delta * index) % ell == 0:
        raise BadPrime(f"{ell} divides 2 * D * [L* : L]")
    r1 = split_root(ctx, ell)
    r2 = (ctx.delta - r1) % ell
    dim = 2 * lat.n
    if ell**dim > 5 * 10**7:
        raise BadPrime(f"L / {ell} L is too large to scan")
    g = lat.zgram
    ga = np.array([[int(x.a) for x in row] for row in g], dtype=np.int64)
    gb = np.array([[int(x.b) for x in row] for row in g], dtype=np.int64)
    tr2 = np.array([[int(x.trace()) for x in row] for row in g], dtype=np.int64)
    w = np.array(
        [[int(x) for x in lat.coords(_omega_times(ctx.delta, z))] for z in lat.basis], dtype=np.int64
    )
    # all residues c in (Z/ell)^dim, first coordinate varying slowest
    powers = ell ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    idx = np.arange(ell**dim, dtype=np.int64)
    cs = (idx[:, None] // powers[None, :]) % ell
    isotropic = (np.einsum("ij,jk,ik->i", cs, tr2, cs) % ell) == 0
    pa = (cs @ ga) % ell
    pb = (cs @ gb) % ell
    in1 = ((pa + pb * r1) % ell == 0).all(axis=1)
    in2 = ((pa + pb * r2) % ell == 0).all(axis=1)
    # x must be primitive in both local components, i.e. h(x, L) meets neither prime
    candidates = np.flatnonzero(isotropic & ~in1 & ~in2)
    seen = np.zeros(ell**dim, dtype=bool)
    st = np.array([(s_, t_) for s_ in range(ell) for t_ in range(ell)], dtype=np.int64)
    found: dict = {}
    for i in candidates:
        if seen[i]:
            continue
        c = cs[i]
        multiples = (st[:, :1] * c[None, :] + st[:, 1:] * (c @ w)[None, :]) % ell
        seen[multiples @ powers] = True
        cl = [int(x) for x in c]
        pair = [lat.h_coeffs(cl, e) for e in _unit_vectors(dim)]
        nb = _neighbor_from(lat, cl, ell, pair)
        found.setdefault(nb.basis, nb)
    return [found[k] for k in sorted(found)]


def _unit_vectors(dim):
    return [tuple(int(i == j) for j in range(dim)) for i in range(dim)]


def _neighbor_from(lat: HermitianLattice, c: list[int], ell: int, pair) -> HermitianLattice:
    dim = len(c)
    hx = lat.h_coeffs(c, c).a
    if hx % (ell * ell):
        j = next((j for j, v in enumerate(pair) if v.trace() % ell), None)
        if j is None:
            raise ArithmeticError("no lifting direction")
        t = (-(hx // ell) * pow(int(pair[j].trace()) % ell, -1, ell)) % ell
        c = list(c)
        c[j] += ell * t
    hx = lat.h_coeffs(c, c).a
    assert hx % (ell * ell) == 0
    # L_x = {y in L : h(y, x) in ell O}, as a kernel mod ell on Z-coordinates
    rows_a = []
    rows_b = []
    for e in _unit_vectors(dim):
        v = lat.h_coeffs(e, c)
        rows_a.append(int(v.a))
        rows_b.append(int(v.b))
    kern = _nullspace_mod([rows_a, rows_b], dim, ell)
    gens_c = [list(k) for k in kern] + [[ell * int(i == j) for j in range(dim)] for i in range(dim)]
    gens = []
    for g in gens_c:
        q = [Fraction(0)] * dim
        for gi, z in zip(g, lat.basis):
            if gi:
                q = [a + gi * b for a, b in zip(q, z)]
        gens.append(q)
    xq = [Fraction(0)] * dim
    for ci, z in zip(c, lat.basis):
        if ci:
            xq = [a + ci * b for a, b in zip(xq, z)]
    xq = tuple(v / ell for v in xq)
    gens += [xq, _omega_times(lat.ctx.delta, xq)]
    nb = HermitianLattice(lat.ctx, lat.gram, gens)
    if not nb.is_integral() or nb.covolume != lat.covolume:
        raise ArithmeticError("neighbour construction left the genus")
    return nb


def default_aux_primes(lat: HermitianLattice, count: int = 2) -> list[int]:
    dual = dual_lattice(lat)
    index = dual_index(lat, dual)
    out = []
    q = 3
    while len(out) < count:
        if isprime(q) and kronecker(lat.ctx.delta, q) == 1 and (2 * lat.ctx.delta * index) % q:
            out.append(q)
        q += 1
    return out


@dataclass(frozen=True)
class GenusRecord:
    classes: tuple
    aut_orders: tuple
    mass: Fraction
    aux_primes: tuple

    def to_json(self) -> dict:
        from .io import lattice_to_json

        return {
            "classes": [lattice_to_json(c) for c in self.classes],
            "aut_orders": list(self.aut_orders),
            "mass": self.mass,
            "aux_primes": list(self.aux_primes),
        }


def _theta_prefix(lat: HermitianLattice, bound: Fraction) -> tuple:
    """Numbers of vectors of each norm up to a bound shared by the whole genus."""
    table = lat.vectors_up_to(bound)
    return tuple((t, len(table[t])) for t in sorted(table))


def genus_enumerate(lat: HermitianLattice, aux_primes=None, class_cap: int = 64) -> GenusRecord:
    """Breadth-first closure of the class of L under neighbours at the auxiliary primes."""
    lat.require_definite()
    primes = tuple(aux_primes) if aux_primes else tuple(default_aux_primes(lat))
    if class_cap < 1:
        raise CapExceeded("class cap must allow at least one class")
    classes = [lat]
    bound = lat.reduced_bound
    invariants = [_theta_prefix(lat, bound)]
    queue = deque([lat])
    while queue:
        cur = queue.popleft()
        for ell in primes:
            for nb in neighbors(cur, ell):
                inv = _theta_prefix(nb, bound)
                if any(inv == inv_j and isometric(nb, cj)[0] for cj, inv_j in zip(classes, invariants)):
                    continue
                classes.append(nb)
                invariants.append(inv)
                queue.append(nb)
                if len(classes) > class_cap:
                    raise CapExceeded(f"more than {class_cap} classes")
    orders = tuple(aut_group(c).order for c in classes)
    mass = sum((Fraction(1, o) for o in orders), Fraction(0))
    return GenusRecord(classes=tuple(classes), aut_orders=orders, mass=mass, aux_primes=primes)


def rep_count(t: HermitianMatrix, lat: HermitianLattice) -> int:
    """Number of ordered tuples (x_1, ..., x_m) in L^m with h(x_i, x_j) = T_ij."""
    lat.require_definite()
    m = t.n
    if m > lat.n:
        raise InvalidInput("target has larger rank than the lattice")
    if signature(t) != (m, 0):
        raise IndefiniteForm("target must be positive definite")
    diag = t.diagonal()
    table = lat.vectors_up_to(max(diag))
    cands = [table.get(d, []) for d in diag]
    chosen: list = []

    def rec(i: int) -> int:
        if i == m:
            return 1
        total = 0
        for c in cands[i]:
            if all(lat.h_coeffs(c, chosen[j]) == t.rows[i][j] for j in range(i)):
                chosen.append(c)
                total += rec(i + 1)
                chosen.pop()
        return total

    return rec(0)


def r_gen(t: HermitianMatrix, genus: GenusRecord) -> Fraction:
    return sum((Fraction(rep_count(t, c), o) for c, o in zip(genus.classes, genus.aut_orders)), Fraction(0))


# ---------------------------------------------------------------------------
# nearly self-dual lattices and the type at 2


def _primary_order_elements(lat: HermitianLattice, dual: HermitianLattice, q: int) -> list[QVec]:
    """Representatives of the elements of order q in dual / lat, smallest first."""
    n2 = 2 * lat.n
    # a basis of dual adapted to lat is not needed: every x with q x in lat is
    # (1/q) * y for y in lat with y/q in dual, so enumerate y mod q lat
    reps = []
    for c in product(range(q), repeat=n2):
        if not any(c):
            continue
        y = [Fraction(0)] * n2
        for ci, z in zip(c, lat.basis):
            if ci:
                y = [a + ci * b for a, b in zip(y, z)]
        x = tuple(v / q for v in y)
        if dual.contains_q(x):
            reps.append((c, x))
    return [x for _, x in sorted(reps)]


def nearly_selfdual_in(ctx: FieldContext, t: HermitianMatrix, p: int) -> HermitianLattice:
    """A lattice L' in the space with Gram T, nearly self-dual at p and self-dual elsewhere."""
    require_odd_inert(ctx, p)
    lat = standard_lattice(ctx, t)
    lat.require_definite()
    if not lat.is_integral():
        raise InvalidInput("T must have entries in O_k")
    d = det_class(t)
    if vp_rational(d, p) % 2 == 0:
        raise Infeasible(f"inv_{p}(V_T) = +1: no nearly self-dual lattice at {p}")
    for q in _prime_divisors(d):
        if q != p and kronecker(ctx.delta, q) == -1 and vp_rational(d, q) % 2:
            raise Infeasible(f"V_T admits no self-dual lattice at the inert prime {q}")
    while True:
        dual = dual_lattice(lat)
        index = dual_index(lat, dual)
        if index == 1:
            break
        # repair the prime with the largest defect first
        defects = sorted(((vp_rational(Fraction(index), q), q) for q in _prime_divisors(index)), reverse=True)
        progressed = False
        for _, q in defects:
            for x in _primary_order_elements(lat, dual, q):
                if herm(lat.gram, vec_of(ctx, x), vec_of(ctx, x)).is_integral():
                    lat = HermitianLattice(ctx, lat.gram, list(lat.basis) + [x, _omega_times(ctx.delta, x)])
                    progressed = True
                    break
            if progressed:
                break
        if not progressed:
            break
    status = selfdual_status(lat)
    if status.kind == "nearly" and status.p == p:
        return lat
    remaining = [q for q in _prime_divisors(dual_index(lat)) if q != p]
    if remaining:
        raise UnsupportedLocale(f"cannot remove the defect at {remaining}")
    raise ArithmeticError(f"overlattice chain ended at status {status}")


def dual_index(lat: HermitianLattice, dual: Optional[HermitianLattice] = None) -> int:
    """[L* : L] for an integral lattice."""
    dual = dual or dual_lattice(lat)
    ratio = lat.covolume / dual.covolume
    if ratio.denominator != 1:
        raise InvalidInput("lattice is not integral")
    return ratio.numerator


def _prime_divisors(x) -> list[int]:
    from sympy import factorint

    x = Fraction(x)
    return sorted(set(factorint(abs(x.numerator))) | set(factorint(x.denominator)))


def lattice_type_at_2(lat: HermitianLattice) -> str:
    """'II' if every h(x, x) on L is even (the lattice must be self-dual at 2), else 'I'."""
    if kronecker(lat.ctx.delta, 2) != 0:
        raise NotRamifiedAt2("2 is not ramified")
    dual = dual_lattice(lat)
    if not dual.contains_lattice(lat):
        raise InvalidInput("lattice is not integral")
    if dual_index(lat, dual) % 2 == 0:
        raise InvalidInput("lattice is not self-dual at 2")
    g = lat.zgram
    r = len(g)
    diag_even = all(g[i][i].a % 2 == 0 for i in range(r))
    cross_even = all(g[i][j].trace() % 2 == 0 for i in range(r) for j in range(i + 1, r))
    return "II" if diag_even and cross_even else "I"
