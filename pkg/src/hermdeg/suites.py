"""Bundled verification suites with exact expected values.

Each check records what was expected, what was computed and whether they are
equal.  Where two independent routes exist (orbit counting and literal column
enumeration, closed forms and enumeration) both are run and compared.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .density import (
    alpha,
    alpha_nearly,
    alpha_prime,
    alpha_reduction_rhs,
    alpha_selfdual,
    brute_count,
    derivative_normalization,
    exact_count,
    mu,
)
from .eisenstein import coefficient_report, volume_ratio, whittaker0, whittaker_prime
from .errors import BudgetExceeded, SuiteUnknown
from .hermitian import (
    HermitianMatrix,
    diff_sets,
    enumerate_relevant_spaces,
    relevant_space_count,
    strict_similarity_classes,
)
from .lattice import aut_group, genus_enumerate, r_gen, rep_count, standard_lattice
from .quadfield import class_number_by_closure, make_field, moduli_component_count

P = 3


@dataclass
class Check:
    id: str
    criterion: int
    expected: object
    got: object
    passed: bool
    seconds: float = 0.0
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "criterion": self.criterion,
            "expected": self.expected,
            "got": self.got,
            "pass": self.passed,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class SuiteResult:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {"suite": self.suite, "checks": [c.to_json() for c in self.checks], "all_pass": self.all_pass}


class _Recorder:
    def __init__(self, result: SuiteResult):
        self.result = result

    def equal(self, cid: str, criterion: int, expected, compute: Callable[[], object], note: str = "") -> Check:
        start = time.perf_counter()
        got = compute()
        check = Check(cid, criterion, expected, got, got == expected, time.perf_counter() - start, note)
        self.result.checks.append(check)
        return check


def _diag(ctx, *values) -> HermitianMatrix:
    return HermitianMatrix.diag(ctx, values)


def _brute_agrees(ctx, s, t, p, levels) -> Callable[[], bool]:
    """Literal enumeration equals the orbit count at every affordable level."""

    def run():
        for k in levels:
            try:
                brute = brute_count(ctx, s, t, p, k).count
            except BudgetExceeded:
                continue
            if brute != exact_count(ctx, s, t, p, k):
                return False
        return True

    return run


def _stabilised(ctx, s, t, p) -> Callable[[], bool]:
    """The reported value is witnessed by two consecutive equal levels."""

    def run():
        res = alpha(ctx, s, t, p)
        (k1, v1), (k2, v2) = res.witnesses[-2:]
        return k2 == k1 + 1 and v1 == v2 == res.value

    return run


# ---------------------------------------------------------------------------


def suite_field() -> SuiteResult:
    out = SuiteResult("field")
    rec = _Recorder(out)
    for delta, h in ((-4, 1), (-3, 1), (-15, 2), (-23, 3), (-84, 4)):
        rec.equal(f"h({delta}) by form closure", 11, h, lambda d=delta: class_number_by_closure(d))
        rec.equal(f"h({delta}) field context", 11, h, lambda d=delta: make_field(d).h)
    for delta, n, count in ((-4, 2, 1), (-15, 2, 2)):
        ctx = make_field(delta)
        rec.equal(
            f"relevant spaces Delta={delta} n={n}",
            11,
            count,
            lambda c=ctx, n=n: relevant_space_count(c, n, (n - 1, 1))["count"],
        )
        rec.equal(
            f"relevant spaces Delta={delta} n={n} (enumerated)",
            11,
            count,
            lambda c=ctx, n=n: len(enumerate_relevant_spaces(c, n, (n - 1, 1))),
        )
    ctx = make_field(-15)
    rec.equal("strict similarity classes Delta=-15 n=3", 11, 1, lambda: relevant_space_count(ctx, 3, (2, 1))["strict_sim_count"])
    rec.equal(
        "strict similarity classes Delta=-15 n=3 (enumerated)",
        11,
        1,
        lambda: len(strict_similarity_classes(ctx, 3, (2, 1))),
    )
    rec.equal("components Delta=-23 n=3", 11, 3, lambda: moduli_component_count(make_field(-23), 3))
    rec.equal("components Delta=-15 n=2", 11, 1, lambda: moduli_component_count(make_field(-15), 2))
    rec.equal(
        "components Delta=-4 n=2 exceptional",
        11,
        1,
        lambda: moduli_component_count(make_field(-4), 2, exceptional_2adic=True),
    )
    return out


def suite_densities() -> SuiteResult:
    out = SuiteResult("densities")
    rec = _Recorder(out)
    ctx = make_field(-4)
    d = lambda *v: _diag(ctx, *v)  # noqa: E731

    # 1. self-dual closed forms
    for n, levels in ((1, (1, 2, 3)), (2, (1, 2))):
        s = HermitianMatrix.identity(ctx, n)
        rec.equal(f"alpha(1_{n}, 1_{n})", 1, alpha_selfdual(n, P), lambda s=s: alpha(ctx, s, s, P).value)
        rec.equal(f"alpha(1_{n}, 1_{n}) brute = orbit", 1, True, _brute_agrees(ctx, s, s, P, levels))
    ctx3 = make_field(-3)
    one = HermitianMatrix.identity(ctx3, 1)
    rec.equal("alpha(1, 1) Delta=-3 p=5", 1, Fraction(6, 5), lambda: alpha(ctx3, one, one, 5).value)
    rec.equal("alpha(1, 1) Delta=-3 p=5 brute = orbit", 1, True, _brute_agrees(ctx3, one, one, 5, (1, 2)))

    # 2 and 6. nearly self-dual S against T of type (a, b)
    target = alpha_nearly(2, P)
    s13 = d(1, 3)
    values = []
    for a, b in ((0, 1), (1, 2), (0, 3)):
        t = d(3**a, 3**b)
        check = rec.equal(f"alpha(diag(1,3), diag(3^{a},3^{b}))", 2, target, lambda t=t: alpha(ctx, s13, t, P).value)
        values.append(check.got)
        rec.equal(f"alpha(diag(1,3), diag(3^{a},3^{b})) brute = orbit", 2, True, _brute_agrees(ctx, s13, t, P, (1, 2)))
        rec.equal(f"alpha(diag(1,3), diag(3^{a},3^{b})) stabilised", 12, True, _stabilised(ctx, s13, t, P))
    rec.equal("closed form with exponent -(n+1) at n=2", 6, Fraction(112, 81), lambda: alpha_nearly(2, P))
    rec.equal("three values coincide", 6, True, lambda: len(set(values)) == 1)
    rec.equal("alpha(diag(1,3), diag(1,3))", 6, target, lambda: alpha(ctx, s13, s13, P).value)

    # 3. one extra unimodular rank against T = (1)
    s113 = d(1, 1, 3)
    rec.equal("alpha(diag(1,1,3), (1))", 3, Fraction(80, 81), lambda: alpha(ctx, s113, d(1), P).value)
    rec.equal("alpha(diag(1,1,3), (1)) brute = orbit", 3, True, _brute_agrees(ctx, s113, d(1), P, (1, 2)))
    rec.equal("alpha(diag(1,1,3), (1)) stabilised", 12, True, _stabilised(ctx, s113, d(1), P))

    # 4. reduction formula
    rhs = Fraction(80, 81) * Fraction(112, 81)
    rec.equal("closed form reduction rhs n=3", 4, rhs, lambda: alpha_reduction_rhs(3, P))
    rec.equal("alpha(diag(1,1,3), diag(1,1,3))", 4, rhs, lambda: alpha(ctx, s113, s113, P).value)
    rec.equal("alpha(diag(1,1,3), diag(1,1,3)) brute = orbit", 4, True, _brute_agrees(ctx, s113, s113, P, (1,)))
    rec.equal("alpha(diag(1,1,3), diag(1,1,3)) stabilised", 12, True, _stabilised(ctx, s113, s113, P))

    # 7. vanishing
    i2 = HermitianMatrix.identity(ctx, 2)
    rec.equal("alpha(1_2, diag(1,3))", 7, Fraction(0), lambda: alpha(ctx, i2, s13, P).value)
    rec.equal("alpha(1_2, diag(1,3)) brute = orbit", 7, True, _brute_agrees(ctx, i2, s13, P, (1, 2)))
    for t in (d(1, 3), d(3, 9), d(1, 27), d(1, 1), d(3, 3), d(1, 9)):
        rec.equal(
            f"whittaker0(diag{tuple(int(x) for x in t.diagonal())}) = 0 iff 3 in Diff0",
            7,
            True,
            lambda t=t: (whittaker0(ctx, t, i2, P).rational_part == 0) == (P in diff_sets(ctx, t).diff0),
        )

    # 8. volume ratio
    rec.equal("volume_ratio(2, 3)", 8, Fraction(7, 54), lambda: volume_ratio(2, P))

    def brute_ratio():
        big = brute_count(ctx, s13, s13, P, 3).scaled  # levels 2 and 3 agree for this pair
        small = brute_count(ctx, i2, i2, P, 2).scaled
        return Fraction(1, 9) * big / small

    rec.equal("|det S'|^2 alpha(S',S') / alpha(S,S) by brute force", 8, Fraction(7, 54), brute_ratio)
    return out


def suite_derivative() -> SuiteResult:
    out = SuiteResult("derivative")
    rec = _Recorder(out)
    ctx = make_field(-4)
    i2 = HermitianMatrix.identity(ctx, 2)
    rec.equal("kappa pinned on S=(1), T=(3)", 5, Fraction(-1, 2), derivative_normalization)
    rec.equal(
        "alpha'((1), (3)) after pinning",
        5,
        alpha_selfdual(1, P) * mu(0, 1, P),
        lambda: alpha_prime(ctx, HermitianMatrix.identity(ctx, 1), _diag(ctx, 3), P),
    )
    for diag, m in (((1, 3), 1), ((3, 9), 5), ((1, 27), 2)):
        t = _diag(ctx, *diag)
        rec.equal(f"mu{diag}", 5, m, lambda t=t: mu(*_ab(ctx, t), P))
        rec.equal(f"alpha'(1_2, diag{diag})", 5, Fraction(32, 27) * m, lambda t=t: alpha_prime(ctx, i2, t, P))
        rec.equal(
            f"whittaker'(diag{diag}) both routes",
            5,
            Fraction(32, 27) * m,
            lambda t=t: whittaker_prime(ctx, t, P, cross_check=True).rational_part,
        )
    return out


def _ab(ctx, t):
    from .density import incoherent_exponents

    return incoherent_exponents(ctx, t, P)


def suite_lattice() -> SuiteResult:
    out = SuiteResult("lattice")
    rec = _Recorder(out)
    ctx = make_field(-4)
    i2 = HermitianMatrix.identity(ctx, 2)
    lat = standard_lattice(ctx, i2)
    genus_box = {}

    def genus():
        if "g" not in genus_box:
            genus_box["g"] = genus_enumerate(lat)
        return genus_box["g"]

    rec.equal("genus of 1_2: classes", 9, 1, lambda: len(genus().classes))
    rec.equal("genus of 1_2: aut order", 9, (32,), lambda: genus().aut_orders)
    rec.equal("genus of 1_2: mass", 9, Fraction(1, 32), lambda: genus().mass)
    rec.equal("rep_count(1_2, L)", 9, 32, lambda: rep_count(i2, lat))
    rec.equal("rep_count(1_2, L) = |Aut L|", 9, True, lambda: rep_count(i2, lat) == aut_group(lat).order)
    rec.equal("r_gen(1_2)", 9, Fraction(1), lambda: r_gen(i2, genus()))
    return out


def suite_maintheorem() -> SuiteResult:
    out = SuiteResult("maintheorem")
    rec = _Recorder(out)
    ctx = make_field(-4)
    ratio = Fraction(ctx.w, ctx.h)
    for diag in ((1, 3), (3, 9), (1, 27)):
        t = _diag(ctx, *diag)
        box = {}

        def report(t=t, box=box):
            if "r" not in box:
                box["r"] = coefficient_report(ctx, t)
            return box["r"]

        rec.equal(f"status diag{diag}", 10, ("inert_case", 3), lambda r=report: (r().status, r().p))
        rec.equal(
            f"normalized / arithmetic degree diag{diag}",
            10,
            ratio,
            lambda r=report: r().normalized_coefficient / r().arithmetic_degree,
        )
        rec.equal(f"r_gen(T) over the genus of L' diag{diag} is positive", 10, True, lambda r=report: r().r_gen_lprime > 0)
    return out


SUITES = {
    "field": suite_field,
    "densities": suite_densities,
    "derivative": suite_derivative,
    "lattice": suite_lattice,
    "maintheorem": suite_maintheorem,
}


def verify_suite(name: str) -> list[SuiteResult]:
    if name == "all":
        return [fn() for fn in SUITES.values()]
    if name not in SUITES:
        raise SuiteUnknown(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}")
    return [SUITES[name]()]
