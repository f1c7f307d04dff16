"""Local representation densities at odd inert primes.

Two independent exact counters are provided for

    A_{p^k}(S, T) = #{x in M_{m,n}(O/p^k) : x^* S x = T  (entrywise mod p^k)}.

``brute_A`` enumerates column by column on the given matrices.  The orbit
counter expands the indicator of ``x^* S x = T`` into additive characters of
Herm_n(O/p^k); the inner sum over ``x`` factors into one-variable hermitian
Gauss sums that depend only on the Jordan type of the frequency matrix, so the
count reduces to a weighted sum over types.  Its cost does not grow with m,
which is what makes the hyperbolic augmentations S_r affordable.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    BadExponents,
    BadSize,
    BudgetExceeded,
    FitMismatch,
    InvalidInput,
    NonStabilized,
    NotIncoherentLocal,
    NotNondegenerate,
    SingularMatrix,
)
from .hermitian import HermitianMatrix, det_class, local_jordan_inert, require_odd_inert
from .quadfield import FieldContext, make_field
from .residues import ResidueRing, valuation_array

DEFAULT_NODE_BUDGET = 10**9


def node_budget() -> int:
    raw = os.environ.get("UC_NODE_BUDGET")
    return int(raw) if raw else DEFAULT_NODE_BUDGET


# ---------------------------------------------------------------------------
# closed forms


def mu(a: int, b: int, p: int) -> Fraction:
    if not (0 <= a < b) or (a + b) % 2 == 0:
        raise BadExponents(f"need 0 <= a < b with a + b odd, got ({a}, {b})")
    return Fraction(sum(p**l * (a + b + 1 - 2 * l) for l in range(a + 1)), 2)


def alpha_selfdual(n: int, p: int) -> Fraction:
    out = Fraction(1)
    for i in range(1, n + 1):
        out *= 1 - Fraction((-1) ** i, p**i)
    return out


def alpha_nearly(n: int, p: int) -> Fraction:
    """Density of a nearly self-dual Gram matrix, with exponent -(n+1) in the correction."""
    if n < 2:
        raise BadSize("defined for n >= 2")
    corr = (1 - Fraction((-1) ** (n + 1), p ** (n + 1))) / (1 - Fraction(1, p * p))
    return alpha_selfdual(n, p) * corr


def alpha_reduction_rhs(n: int, p: int) -> Fraction:
    if n < 2:
        raise BadSize("defined for n >= 2")
    out = Fraction(1)
    for i in range(2, n):
        out *= 1 - Fraction((-1) ** i, p ** (i + 2))
    return out * (1 + Fraction(1, p)) * (1 + Fraction(1, p**3))


# ---------------------------------------------------------------------------
# literal column enumeration


@dataclass(frozen=True)
class ResidueCount:
    p: int
    k: int
    count: int
    scaled: Fraction

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "count": self.count, "scaled": self.scaled}


def scale_count(count: int, m: int, n: int, p: int, k: int) -> Fraction:
    return Fraction(count, p ** (k * n * (2 * m - n)))


def _check_pair(ctx: FieldContext, s: HermitianMatrix, t: HermitianMatrix, p: int) -> None:
    require_odd_inert(ctx, p)
    for name, g in (("S", s), ("T", t)):
        if not g.is_integral():
            raise InvalidInput(f"{name} must have entries in O_k")
        if det_class(g) == 0:
            raise SingularMatrix(f"det {name} = 0")


def _cache_path(cache_dir, ctx, s, t, p, k) -> Path:
    key = json.dumps(
        [ctx.delta, [[str(x) for x in r] for r in s.to_pairs()], [[str(x) for x in r] for r in t.to_pairs()], p, k]
    )
    return Path(cache_dir) / f"brute_{hashlib.sha256(key.encode()).hexdigest()[:32]}.json"


def brute_A(
    ctx: FieldContext,
    s: HermitianMatrix,
    t: HermitianMatrix,
    p: int,
    k: int,
    budget: Optional[int] = None,
    cache_dir=None,
) -> int:
    """|A_{p^k}(S, T)| by column-wise enumeration with pruning after every column."""
    _check_pair(ctx, s, t, p)
    if k < 1:
        raise InvalidInput("k must be at least 1")
    if cache_dir is not None:
        path = _cache_path(cache_dir, ctx, s, t, p, k)
        if path.exists():
            return int(json.loads(path.read_text())["count"])
    count = _column_count(ctx, s, t, p, k, node_budget() if budget is None else budget)
    if cache_dir is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({"count": count}))
    return count


CHUNK = 1 << 21
CANDIDATE_CAP = 4 * 10**7


def _column_count(ctx, s, t, p, k, budget) -> int:
    ring = ResidueRing(ctx.delta, p, k)
    m, n = s.n, t.n
    total = ring.q ** (2 * m)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate columns exceed the node budget {budget}")
    sa = np.array([[ring.reduce_elt(x)[0] for x in r] for r in s.rows], dtype=np.int64)
    sb = np.array([[ring.reduce_elt(x)[1] for x in r] for r in s.rows], dtype=np.int64)
    tt = [[ring.reduce_elt(x) for x in r] for r in t.rows]

    def row_times_s(ya, yb):
        # u = y^* S, one row vector per candidate
        ca, cb = ring.conj(ya, yb)
        ua = np.zeros_like(ya)
        ub = np.zeros_like(yb)
        for c in range(m):
            for l in range(m):
                pa, pb = ring.mul(ca[:, l], cb[:, l], sa[l, c], sb[l, c])
                ua[:, c] += pa
                ub[:, c] += pb
        return ua % ring.q, ub % ring.q

    def pair(ua, ub, ya, yb):
        ra = np.zeros(len(ya), dtype=np.int64)
        rb = np.zeros(len(ya), dtype=np.int64)
        for l in range(m):
            pa, pb = ring.mul(ua[:, l], ub[:, l], ya[:, l], yb[:, l])
            ra += pa
            rb += pb
        return ra % ring.q, rb % ring.q

    # pass 1: stream all columns, keep those whose norm hits some diagonal target
    targets = sorted({tt[j][j] for j in range(n)})
    kept: dict = {tg: [] for tg in targets}
    n_kept = 0
    for start in range(0, total, CHUNK):
        va, vb = ring.vectors(m, start, min(total, start + CHUNK))
        ua, ub = row_times_s(va, vb)
        qa, qb = pair(ua, ub, va, vb)
        for tg in targets:
            hit = np.nonzero((qa == tg[0]) & (qb == tg[1]))[0]
            if n == 1:
                kept[tg].append(len(hit))
                continue
            kept[tg].append(hit + start)
            n_kept += len(hit)
        if n_kept > CANDIDATE_CAP:
            raise BudgetExceeded("too many candidate columns to hold in memory")
    if n == 1:
        return int(sum(kept[tt[0][0]]))

    cands = []
    for j in range(n):
        idx = np.concatenate(kept[tt[j][j]])
        ya, yb = ring.decode(m, idx)
        cands.append((ya, yb))

    nodes = 0

    def rec(j: int, chosen: list) -> int:
        nonlocal nodes
        ya, yb = cands[j]
        mask = np.ones(len(ya), dtype=bool)
        for i, (ua, ub) in enumerate(chosen):
            ra, rb = pair(np.broadcast_to(ua, ya.shape), np.broadcast_to(ub, yb.shape), ya, yb)
            ta, tb = tt[i][j]
            mask &= (ra == ta) & (rb == tb)
        nodes += len(ya)
        if nodes > budget:
            raise BudgetExceeded(f"column search exceeded the node budget {budget}")
        if j == n - 1:
            return int(mask.sum())
        hits = np.nonzero(mask)[0]
        ua_h, ub_h = row_times_s(ya[hits], yb[hits])
        return sum(rec(j + 1, chosen + [(ua_h[h], ub_h[h])]) for h in range(len(hits)))

    return rec(0, [])


def brute_count(ctx, s, t, p, k, budget=None, cache_dir=None) -> ResidueCount:
    c = brute_A(ctx, s, t, p, k, budget=budget, cache_dir=cache_dir)
    return ResidueCount(p=p, k=k, count=c, scaled=scale_count(c, s.n, t.n, p, k))


# ---------------------------------------------------------------------------
# orbit counter


def gauss_sum(e: int, p: int, k: int) -> int:
    """sum over z in O/p^k of exp(2 pi i p^e N(z) / p^k), for p inert."""
    if e >= k:
        return p ** (2 * k)
    return p ** (2 * e) * (-p) ** (k - e)


def gauss_sum_enumerated(delta: int, e: int, p: int, k: int) -> int:
    """The same Gauss sum by enumerating O/p^k; used as an oracle."""
    ring = ResidueRing(delta, p, k)
    a, b = ring.all_elements()
    vals = (ring.norm(a, b) * (p**e % ring.q if e < k else 0)) % ring.q
    counts = np.bincount(vals, minlength=ring.q)
    return _rational_character_sum(counts, p, k)


def _rational_character_sum(counts: np.ndarray, p: int, k: int) -> int:
    """sum_r counts[r] exp(2 pi i r / p^k) when counts depend only on v_p(r)."""
    q = p**k
    r = np.arange(q, dtype=np.int64)
    v = valuation_array(r, p, k)
    total = 0
    for j in range(k + 1):
        shell = counts[v == j]
        if len(shell) == 0:
            continue
        if not (shell == shell[0]).all():
            raise ArithmeticError("character sum is not Galois invariant")
        total += int(shell[0]) * _shell_sum(1, j, p, k)
    return total


def _full_sum(t: int, e: int, p: int, k: int) -> int:
    # sum over b = p^e c, c mod p^(k-e), of exp(-2 pi i t b / p^k)
    if e >= k:
        return 1
    return p ** (k - e) if t % p ** (k - e) == 0 else 0


def _shell_sum(t: int, e: int, p: int, k: int) -> int:
    """sum over b mod p^k with v_p(b) = e of exp(-2 pi i t b / p^k); e = k means b = 0."""
    if e >= k:
        return 1
    return _full_sum(t, e, p, k) - _full_sum(t, e + 1, p, k)


@lru_cache(maxsize=None)
def _rank2_type_counts(delta: int, p: int, k: int) -> dict:
    """For B = [[b1, beta], [conj beta, b2]] with v(b1) = e, v(b2) = f, count beta by Jordan type.

    The count only depends on (e, f): scaling beta by a unit of norm u moves
    b1*b2 to u*b1*b2, so b1 = p^e and b2 = p^f may be taken as representatives.
    """
    ring = ResidueRing(delta, p, k)
    a, b = ring.all_elements()
    # an integer lift of N(beta), exact
    nb = a * a + delta * a * b + ring.nw * b * b
    vbeta = np.minimum(valuation_array(a, p, k), valuation_array(b, p, k))
    out = {}
    for e in range(k + 1):
        for f in range(k + 1):
            b1 = p**e if e < k else 0
            b2 = p**f if f < k else 0
            e1 = np.minimum(np.minimum(e, f), vbeta)
            det = b1 * b2 - nb
            scaled = det // (p ** (2 * np.minimum(e1, k)))
            assert ((det % (p ** (2 * np.minimum(e1, k)))) == 0).all()
            vd = valuation_array(scaled, p, k)
            e2 = np.where(e1 >= k, k, e1 + np.minimum(vd, k - e1))
            e1 = np.minimum(e1, k)
            keys, cnt = np.unique(np.stack([e1, e2]), axis=1, return_counts=True)
            out[(e, f)] = {(int(x), int(y)): int(c) for (x, y), c in zip(keys.T, cnt)}
    return out


def _type_weights(delta: int, t_exps: tuple[int, ...], p: int, k: int) -> dict:
    """W(lambda) = sum of exp(-2 pi i tr(T B) / p^k) over B in Herm_n(O/p^k) of type lambda."""
    n = len(t_exps)
    if n == 1:
        (t,) = t_exps
        tv = p**t
        return {(e,): _shell_sum(tv, e, p, k) for e in range(k + 1)}
    if n == 2:
        t1, t2 = (p**x for x in t_exps)
        out: dict = {}
        for (e, f), by_type in _rank2_type_counts(delta, p, k).items():
            w = _shell_sum(t1, e, p, k) * _shell_sum(t2, f, p, k)
            if w == 0:
                continue
            for lam, c in by_type.items():
                out[lam] = out.get(lam, 0) + w * c
        return out
    raise NotImplementedError("type weights are only tabulated for n <= 2")


def orbit_count(delta: int, s_exps, t_exps, p: int, k: int) -> int:
    """|A_{p^k}(S, T)| from the Jordan exponents of S and T (n <= 2, or peelable)."""
    s_exps = tuple(sorted(s_exps))
    t_exps = tuple(sorted(t_exps))
    n = len(t_exps)
    if n == 0:
        return 1
    if n > 2:
        if t_exps[0] != 0:
            raise NotImplementedError("no unimodular block to split off")
        # x = (y | rest): y represents 1, and the rest lives in the orthogonal
        # complement of y, which is S with one unimodular rank removed
        if 0 not in s_exps:
            return 0
        rest = list(s_exps)
        rest.remove(0)
        return orbit_count(delta, s_exps, (0,), p, k) * orbit_count(delta, tuple(rest), t_exps[1:], p, k)
    weights = _type_weights(delta, t_exps, p, k)
    total = 0
    for lam, w in weights.items():
        g = 1
        for si in s_exps:
            for lj in lam:
                g *= gauss_sum(si + lj, p, k)
        total += w * g
    denom = p ** (k * n * n)
    if total % denom:
        raise ArithmeticError("orbit count is not an integer")
    return total // denom


def jordan_exponents(ctx: FieldContext, g: HermitianMatrix, p: int) -> tuple[int, ...]:
    return local_jordan_inert(ctx, g, p).exponents


def exact_count(ctx, s, t, p, k) -> int:
    _check_pair(ctx, s, t, p)
    return orbit_count(ctx.delta, jordan_exponents(ctx, s, p), jordan_exponents(ctx, t, p), p, k)


# ---------------------------------------------------------------------------
# stabilised densities


@dataclass(frozen=True)
class AlphaResult:
    value: Fraction
    k_used: int
    witnesses: tuple[tuple[int, Fraction], ...]

    def to_json(self) -> dict:
        return {
            "alpha": self.value,
            "k_used": self.k_used,
            "witnesses": [{"k": k, "scaled": v} for k, v in self.witnesses],
        }


def alpha_from_exponents(delta: int, s_exps, t_exps, p: int, budget: Optional[int] = None) -> AlphaResult:
    budget = node_budget() if budget is None else budget
    m, n = len(s_exps), len(t_exps)
    k = max(tuple(s_exps) + tuple(t_exps)) + 1
    seen = []
    prev = None
    while True:
        if p ** (2 * k) > budget:
            raise NonStabilized(f"no two consecutive levels agreed before k = {k}")
        val = scale_count(orbit_count(delta, s_exps, t_exps, p, k), m, n, p, k)
        seen.append((k, val))
        if prev is not None and val == prev:
            return AlphaResult(value=val, k_used=k, witnesses=tuple(seen))
        prev = val
        k += 1


def alpha(ctx: FieldContext, s: HermitianMatrix, t: HermitianMatrix, p: int, budget=None) -> AlphaResult:
    """alpha_p(S, T): the scaled count, once two consecutive levels agree."""
    _check_pair(ctx, s, t, p)
    return alpha_from_exponents(ctx.delta, jordan_exponents(ctx, s, p), jordan_exponents(ctx, t, p), p, budget)


def alpha_value(ctx, s, t, p) -> Fraction:
    return alpha(ctx, s, t, p).value


# ---------------------------------------------------------------------------
# density polynomial and central derivative


def hyperbolic_augment(ctx: FieldContext, s: HermitianMatrix, r: int) -> HermitianMatrix:
    """S bordered with r hyperbolic planes [[0, 1], [1, 0]]."""
    out = s
    plane = HermitianMatrix([[ctx.zero, ctx.one], [ctx.one, ctx.zero]], ctx.delta)
    for _ in range(r):
        out = out.block_sum(plane)
    return out


def _interpolate(xs: list[Fraction], ys: list[Fraction]) -> list[Fraction]:
    """Coefficients (ascending) of the polynomial through the points, via Newton's form."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [shifted[d] - xs[i] * poly[d] for d in range(n)]
        poly[0] += coef[i]
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


@dataclass(frozen=True)
class DensityPolynomial:
    p: int
    coeffs: tuple[Fraction, ...]
    support_points: tuple[tuple[int, Fraction], ...]
    held_out: tuple[int, Fraction]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if any(self.coeffs) else 0

    def evaluate(self, x) -> Fraction:
        x = Fraction(x)
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def at_r(self, r: int) -> Fraction:
        return self.evaluate(Fraction(-self.p) ** (-r))

    def derivative(self, x) -> Fraction:
        x = Fraction(x)
        out = Fraction(0)
        for d in range(len(self.coeffs) - 1, 0, -1):
            out = out * x + d * self.coeffs[d]
        return out

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "coeffs": list(self.coeffs),
            "degree": self.degree,
            "support_points": [{"r": r, "value": v} for r, v in self.support_points],
            "held_out": {"r": self.held_out[0], "value": self.held_out[1]},
        }


def density_poly(ctx, s, t, p, deg: Optional[int] = None, max_deg: Optional[int] = None) -> DensityPolynomial:
    """Interpolate r -> alpha_p(S_r, T) in the variable X = (-p)^(-r), checked on a held-out point."""
    _check_pair(ctx, s, t, p)
    escalate = deg is None
    deg = t.n if deg is None else deg
    if deg < 0:
        raise InvalidInput("deg must be non-negative")
    t_exps = jordan_exponents(ctx, t, p)
    if max_deg is None:
        # observed degree is 2 (n + ord_p det T); leave headroom above it
        max_deg = max(deg, 2 * (t.n + sum(t_exps)) + 2) if escalate else deg
    values: dict = {}

    def value(r: int) -> Fraction:
        if r not in values:
            s_r = hyperbolic_augment(ctx, s, r)
            values[r] = alpha_from_exponents(ctx.delta, jordan_exponents(ctx, s_r, p), t_exps, p).value
        return values[r]

    while True:
        xs = [Fraction(-p) ** (-r) for r in range(deg + 1)]
        ys = [value(r) for r in range(deg + 1)]
        coeffs = _interpolate(xs, ys)
        poly = DensityPolynomial(
            p=p,
            coeffs=tuple(coeffs),
            support_points=tuple(zip(range(deg + 1), ys)),
            held_out=(deg + 1, value(deg + 1)),
        )
        if poly.at_r(deg + 1) == value(deg + 1):
            return poly
        if deg >= max_deg:
            raise FitMismatch(f"held-out point r = {deg + 1} does not lie on the degree-{deg} fit")
        deg += 1


PIN_DELTA, PIN_P, PIN_TARGET = -4, 3, Fraction(4, 3)


@lru_cache(maxsize=1)
def derivative_normalization() -> Fraction:
    """kappa: the constant with kappa * F'(1) = 4/3 on S = (1), T = (3), Delta = -4, p = 3."""
    ctx = make_field(PIN_DELTA)
    poly = density_poly(ctx, HermitianMatrix.diag(ctx, [1]), HermitianMatrix.diag(ctx, [PIN_P]), PIN_P)
    slope = poly.derivative(1)
    if slope == 0:
        raise ArithmeticError("pinning instance has a vanishing derivative")
    return PIN_TARGET / slope


def incoherent_exponents(ctx, t: HermitianMatrix, p: int) -> tuple[int, int]:
    """(a, b) for T of Jordan type (0,...,0,a,b) with a + b odd."""
    ex = jordan_exponents(ctx, t, p)
    if t.n == 1:
        a, b = 0, ex[0]
        if b == 0:
            raise NotIncoherentLocal("T is represented by the self-dual space")
    else:
        if any(e != 0 for e in ex[:-2]):
            raise NotNondegenerate(f"Jordan exponents {ex} are not of the form (0,...,0,a,b)")
        a, b = ex[-2], ex[-1]
    if (a + b) % 2 == 0:
        raise NotIncoherentLocal(f"a + b = {a + b} is even: T is represented locally")
    return a, b


def alpha_prime(ctx, s: HermitianMatrix, t: HermitianMatrix, p: int) -> Fraction:
    """kappa * F'(1) for the density polynomial of (S, T)."""
    _check_pair(ctx, s, t, p)
    if any(jordan_exponents(ctx, s, p)):
        raise InvalidInput("S must be self-dual at p")
    incoherent_exponents(ctx, t, p)
    poly = density_poly(ctx, s, t, p)
    return derivative_normalization() * poly.derivative(1)
