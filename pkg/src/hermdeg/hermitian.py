"""Hermitian matrices over k: determinants, local invariants, Diff sets, Jordan forms.

Gram matrices follow the convention ``G[i][j] = h(e_i, e_j)`` with ``h`` linear
in the first argument and conjugate-linear in the second.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count, product
from typing import Callable, Iterable, Optional, Sequence

from sympy import factorint, primerange

from .errors import (
    EvenPrime,
    InvalidInput,
    NotInert,
    ProductFormulaViolation,
    SingularMatrix,
    SymmetryError,
    UnsupportedCase,
)
from .quadfield import INERT, SPLIT, FieldContext, KElement, hilbert_chi, kronecker


class HermitianMatrix:
    """A conjugate-symmetric n x n matrix with entries in k."""

    __slots__ = ("rows", "delta")

    def __init__(self, rows: Sequence[Sequence[KElement]], delta: int, check: bool = True):
        self.rows = tuple(tuple(r) for r in rows)
        self.delta = delta
        if check:
            n = len(self.rows)
            if any(len(r) != n for r in self.rows):
                raise InvalidInput("matrix must be square")
            for i in range(n):
                for j in range(i, n):
                    if self.rows[j][i] != self.rows[i][j].conj():
                        raise SymmetryError(f"entry ({j},{i}) is not the conjugate of ({i},{j})")

    @classmethod
    def from_pairs(cls, ctx: FieldContext, rows) -> "HermitianMatrix":
        return cls([[ctx.elt(a, b) for a, b in row] for row in rows], ctx.delta)

    @classmethod
    def diag(cls, ctx: FieldContext, values: Iterable) -> "HermitianMatrix":
        vals = list(values)
        n = len(vals)
        return cls(
            [[ctx.elt(vals[i]) if i == j else ctx.zero for j in range(n)] for i in range(n)],
            ctx.delta,
        )

    @classmethod
    def identity(cls, ctx: FieldContext, n: int) -> "HermitianMatrix":
        return cls.diag(ctx, [1] * n)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, HermitianMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"HermitianMatrix({self.to_pairs()})"

    def to_pairs(self):
        return [[(x.a, x.b) for x in row] for row in self.rows]

    def mutable(self) -> list[list[KElement]]:
        return [list(r) for r in self.rows]

    def is_integral(self) -> bool:
        return all(x.is_integral() for r in self.rows for x in r)

    def diagonal(self) -> list[Fraction]:
        return [self.rows[i][i].a for i in range(self.n)]

    def det(self) -> Fraction:
        return det_class(self)

    def congruent(self, u: Sequence[Sequence[KElement]]) -> "HermitianMatrix":
        """The Gram matrix of the basis given by the rows of ``u``: U G U^*."""
        ug = mat_mul(u, self.rows)
        return HermitianMatrix(mat_mul(ug, conj_transpose(u)), self.delta, check=False)

    def block_sum(self, other: "HermitianMatrix") -> "HermitianMatrix":
        n, m = self.n, other.n
        z = KElement(Fraction(0), Fraction(0), self.delta)
        rows = [list(r) + [z] * m for r in self.rows]
        rows += [[z] * n + list(r) for r in other.rows]
        return HermitianMatrix(rows, self.delta, check=False)


def mat_mul(a, b):
    m = len(b[0])
    inner = len(b)
    return [[sum((a[i][t] * b[t][j] for t in range(inner)), b[0][0] * 0) for j in range(m)] for i in range(len(a))]


def conj_transpose(a):
    return [[a[i][j].conj() for i in range(len(a))] for j in range(len(a[0]))]


def _kdet(rows: list[list[KElement]]) -> KElement:
    """Determinant by Gaussian elimination over the field k."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        raise InvalidInput("empty matrix")
    det = m[0][0] * 0 + 1
    for c in range(n):
        piv = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
        if piv is None:
            return m[0][0] * 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c]
        inv = m[c][c].inverse()
        for r in range(c + 1, n):
            if m[r][c].is_zero():
                continue
            f = m[r][c] * inv
            m[r] = [m[r][j] - f * m[c][j] for j in range(n)]
    return det


def det_class(t: HermitianMatrix) -> Fraction:
    d = _kdet(t.mutable())
    if not d.is_rational():
        raise InvalidInput("determinant of a hermitian matrix must be rational")
    return d.a


def congruence_diagonalize(
    rows: list[list[KElement]], weight: Callable[[KElement], Optional[int]]
) -> list[KElement]:
    """Diagonal of a congruent diagonal form, choosing pivots of least ``weight``.

    ``weight`` returns ``None`` for entries that may not serve as pivots.  When
    the best entry sits off the diagonal, the basis vector e_i is replaced by
    e_i + c e_j with c in {1, omega}, which moves a pivot of the same weight
    onto the diagonal.
    """
    g = [list(r) for r in rows]
    out = []
    while g:
        n = len(g)
        best = None
        for i in range(n):
            for j in range(i, n):
                w = weight(g[i][j])
                if w is None:
                    continue
                key = (w, 0 if i == j else 1)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            raise SingularMatrix("matrix is singular")
        (w, off), i, j = best
        if off:
            for c in (KElement(Fraction(1), Fraction(0), g[i][j].delta), KElement(Fraction(0), Fraction(1), g[i][j].delta)):
                # h(e_i + c e_j, e_i + c e_j) = g_ii + N(c) g_jj + tr(conj(c) g_ij)
                cand = g[i][i] + c.norm() * g[j][j] + (c.conj() * g[i][j]).trace()
                if weight(cand) == w:
                    _add_multiple(g, i, j, c)
                    break
            else:
                raise SingularMatrix("no pivot could be moved onto the diagonal")
        piv = i
        g[0], g[piv] = g[piv], g[0]
        for r in g:
            r[0], r[piv] = r[piv], r[0]
        d = g[0][0]
        dinv = d.inverse()
        for r in range(1, n):
            f = g[r][0] * dinv
            if f.is_zero():
                continue
            # e_r <- e_r - f e_0
            _add_multiple(g, r, 0, -f)
        out.append(d)
        g = [row[1:] for row in g[1:]]
    return out


def _add_multiple(g, i, j, c: KElement):
    """Replace basis vector e_i by e_i + c e_j in the Gram matrix ``g``."""
    n = len(g)
    g[i] = [g[i][k] + c * g[j][k] for k in range(n)]
    cc = c.conj()
    for k in range(n):
        g[k][i] = g[k][i] + cc * g[k][j]


def _vp_int(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def vp_rational(x: Fraction, p: int) -> Optional[int]:
    if x == 0:
        return None
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def vp_inert(x: KElement, p: int) -> Optional[int]:
    """Valuation at an inert prime: the minimum over the integral-basis coordinates."""
    vals = [v for v in (vp_rational(x.a, p), vp_rational(x.b, p)) if v is not None]
    return min(vals) if vals else None


@dataclass(frozen=True)
class SpaceInvariants:
    n: int
    sig: tuple[int, int]
    inv: dict
    det_class: Fraction

    def local_inv(self, ctx: FieldContext, p: int) -> int:
        if p in self.inv:
            return self.inv[p]
        return hilbert_chi(ctx, self.det_class, p)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "sig": list(self.sig),
            "inv": {str(p): s for p, s in sorted(self.inv.items())},
            "det_class": self.det_class,
        }


def _relevant_primes(ctx: FieldContext, *rationals) -> list[int]:
    ps = {2} | set(ctx.delta_primes)
    for r in rationals:
        r = Fraction(r)
        ps |= set(factorint(abs(r.numerator))) | set(factorint(r.denominator))
    ps.discard(1)
    return sorted(ps)


def signature(t: HermitianMatrix) -> tuple[int, int]:
    diag = congruence_diagonalize(t.mutable(), lambda x: None if x.is_zero() else 0)
    pos = sum(1 for d in diag if d.a > 0)
    return (pos, t.n - pos)


def space_invariants(ctx: FieldContext, t: HermitianMatrix) -> SpaceInvariants:
    d = det_class(t)
    if d == 0:
        raise SingularMatrix("det T = 0")
    sig = signature(t)
    inv = {p: hilbert_chi(ctx, d, p) for p in _relevant_primes(ctx, d)}
    return SpaceInvariants(n=t.n, sig=sig, inv=inv, det_class=d)


@dataclass(frozen=True)
class DiffReport:
    diff_v: Optional[list]
    diff0: list

    def to_json(self) -> dict:
        return {"diff_v": self.diff_v, "diff0": self.diff0}


def default_relevant_space(ctx: FieldContext, n: int) -> Optional[SpaceInvariants]:
    """The unique incoherent companion space when only one ramified prime exists.

    It has signature (n-1, 1) and invariant +1 at every unramified prime, so the
    product formula pins the ramified invariant to -1.  With two or more
    ramified primes the choice is not unique and ``None`` is returned.
    """
    if ctx.num_ramified != 1:
        return None
    q = ctx.delta_primes[0]
    return landherr(ctx, n, (n - 1, 1), {q: -1}).invariants


def diff_sets(ctx: FieldContext, t: HermitianMatrix, v: Optional[SpaceInvariants] = None) -> DiffReport:
    d = det_class(t)
    if d == 0:
        raise SingularMatrix("det T = 0")
    diff0 = sorted(
        p for p in _relevant_primes(ctx, d)
        if kronecker(ctx.delta, p) == -1 and vp_rational(d, p) % 2 == 1
    )
    if v is None:
        v = default_relevant_space(ctx, t.n)
    if v is None:
        return DiffReport(diff_v=None, diff0=diff0)
    primes = _relevant_primes(ctx, d, v.det_class) + sorted(v.inv)
    diff_v = sorted({p for p in primes if hilbert_chi(ctx, d, p) == -v.local_inv(ctx, p)})
    return DiffReport(diff_v=diff_v, diff0=diff0)


def require_odd_inert(ctx: FieldContext, p: int) -> None:
    if p == 2:
        raise EvenPrime("p = 2 is not supported")
    if kronecker(ctx.delta, p) != -1:
        raise NotInert(f"{p} is not inert in Q(sqrt({ctx.delta}))")


@dataclass(frozen=True)
class LocalJordan:
    p: int
    exponents: tuple[int, ...]

    def to_json(self) -> dict:
        return {"p": self.p, "exponents": list(self.exponents)}


def local_jordan_inert(ctx: FieldContext, t: HermitianMatrix, p: int) -> LocalJordan:
    require_odd_inert(ctx, p)
    if det_class(t) == 0:
        raise SingularMatrix("det T = 0")
    diag = congruence_diagonalize(t.mutable(), lambda x: vp_inert(x, p))
    return LocalJordan(p=p, exponents=tuple(sorted(vp_rational(d.a, p) for d in diag)))


@dataclass(frozen=True)
class NondegeneracyReport:
    nondeg: bool
    a: Optional[int]
    b: Optional[int]
    r0: int
    predicted_dim: int

    def to_json(self) -> dict:
        return {
            "nondeg": self.nondeg,
            "a": self.a,
            "b": self.b,
            "r0": self.r0,
            "predicted_dim": self.predicted_dim,
        }


def nondegeneracy_report(ctx: FieldContext, t: HermitianMatrix, p: int) -> NondegeneracyReport:
    jordan = local_jordan_inert(ctx, t, p)
    if signature(t) != (t.n, 0):
        raise InvalidInput("T must be positive definite")
    if t.n < 2:
        raise UnsupportedCase("the non-degeneracy criterion needs n >= 2")
    ex = jordan.exponents
    r0 = sum(1 for e in ex if e > 0)
    head, (a, b) = ex[:-2], ex[-2:]
    nondeg = all(e == 0 for e in head) and a < b and (a + b) % 2 == 1
    return NondegeneracyReport(
        nondeg=nondeg,
        a=a if nondeg else None,
        b=b if nondeg else None,
        r0=r0,
        predicted_dim=(r0 - 1) // 2,
    )


def _check_signature(n: int, sig) -> tuple[int, int]:
    r, s = sig
    if r < 0 or s < 0 or r + s != n:
        raise InvalidInput(f"signature {sig} does not have size {n}")
    return (r, s)


def relevant_space_count(ctx: FieldContext, n: int, sig) -> dict:
    _check_signature(n, sig)
    c = 2 ** (ctx.num_ramified - 1)
    return {"count": c, "strict_sim_count": c if n % 2 == 0 else 1}


@dataclass(frozen=True)
class LandherrResult:
    invariants: SpaceInvariants
    self_dual_feasible: bool

    def to_json(self) -> dict:
        out = self.invariants.to_json()
        out["self_dual_feasible"] = self.self_dual_feasible
        return out


def _det_representative(ctx: FieldContext, s: int, inv: dict) -> Fraction:
    """A smallest rational of sign (-1)^s whose local invariants are ``inv``."""
    sign = -1 if s % 2 else 1
    for m in count(1):
        d = Fraction(sign * m)
        primes = _relevant_primes(ctx, d) + list(inv)
        if all(hilbert_chi(ctx, d, p) == inv.get(p, 1) for p in primes):
            return d


def landherr(ctx: FieldContext, n: int, sig, inv_spec: dict) -> LandherrResult:
    """The hermitian space with given signature and local invariants, if one exists."""
    r, s = _check_signature(n, sig)
    inv = {int(p): int(e) for p, e in inv_spec.items() if int(e) != 1}
    for p, e in inv.items():
        if e != -1:
            raise InvalidInput(f"invariant at {p} must be +1 or -1")
        if kronecker(ctx.delta, p) == 1:
            raise InvalidInput(f"invariant at split prime {p} must be +1")
    total = (-1) ** (len(inv) + s)
    if total != 1:
        raise ProductFormulaViolation("local invariants violate the product formula")
    d = _det_representative(ctx, s, inv)
    full = {p: hilbert_chi(ctx, d, p) for p in sorted(set(_relevant_primes(ctx, d)) | set(inv))}
    feasible = all(kronecker(ctx.delta, p) != -1 for p in inv)
    return LandherrResult(SpaceInvariants(n=n, sig=(r, s), inv=full, det_class=d), feasible)


def enumerate_relevant_spaces(ctx: FieldContext, n: int, sig) -> list[SpaceInvariants]:
    """Every space of the signature that carries a self-dual lattice, by trying all ramified signs."""
    _check_signature(n, sig)
    out = []
    for signs in product((1, -1), repeat=ctx.num_ramified):
        spec = dict(zip(ctx.delta_primes, signs))
        try:
            res = landherr(ctx, n, sig, spec)
        except ProductFormulaViolation:
            continue
        if res.self_dual_feasible:
            out.append(res.invariants)
    return out


def strict_similarity_classes(ctx: FieldContext, n: int, sig, scale_bound: int = 100) -> list[list[SpaceInvariants]]:
    """Relevant spaces grouped by rescaling the form with positive rationals built from small primes."""
    spaces = enumerate_relevant_spaces(ctx, n, sig)
    keys = [tuple(s.local_inv(ctx, q) for q in ctx.delta_primes) for s in spaces]
    parent = list(range(len(spaces)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in primerange(2, scale_bound):
        if n % 2 and kronecker(ctx.delta, a) == -1:
            continue  # V(a) would lose its self-dual lattice at a
        # det V(a) = a^n det V, so each ramified invariant picks up chi_q(a)^n
        shift = tuple(hilbert_chi(ctx, Fraction(a), q) ** n for q in ctx.delta_primes)
        for i, key in enumerate(keys):
            moved = tuple(x * y for x, y in zip(key, shift))
            if moved in keys:
                j = keys.index(moved)
                parent[find(i)] = find(j)
    groups: dict = {}
    for i, s in enumerate(spaces):
        groups.setdefault(find(i), []).append(s)
    return list(groups.values())
