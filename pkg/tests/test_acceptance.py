"""Acceptance criteria, each compared exactly with its runtime limit.

Every test appends one ``CRITERION n: PASS|FAIL`` line that is printed in the
terminal summary.
"""

import time
from fractions import Fraction

import pytest
from conftest import ACCEPTANCE_LINES

import test_properties as props
from hermdeg.suites import SUITES

# criterion -> (suites holding its checks, runtime limit in seconds)
CRITERIA = {
    1: (("densities",), 60),
    2: (("densities",), 600),
    3: (("densities",), 300),
    4: (("densities",), 900),
    5: (("derivative",), 1200),
    6: (("densities",), 600),
    7: (("densities",), 600),
    8: (("densities",), 600),
    9: (("lattice",), 60),
    10: (("maintheorem",), 600),
    11: (("field",), 600),
}

_RUNS: dict = {}


def _suite(name):
    if name not in _RUNS:
        _RUNS[name] = SUITES[name]()
    return _RUNS[name]


def _describe(check):
    return f"{check.id}: expected {_fmt(check.expected)}, got {_fmt(check.got)}"


def _fmt(x):
    return str(x) if not isinstance(x, Fraction) else f"{x.numerator}/{x.denominator}"


def _record(criterion, checks, seconds, limit):
    failed = [c for c in checks if not c.passed]
    in_time = seconds < limit
    ok = bool(checks) and not failed and in_time
    detail = f"{len(checks) - len(failed)}/{len(checks)} checks, {seconds:.1f}s (limit {limit}s)"
    if failed:
        detail += "; " + "; ".join(_describe(c) for c in failed)
    line = f"CRITERION {criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, line


@pytest.mark.parametrize("criterion", sorted(CRITERIA))
def test_criterion(criterion):
    suites, limit = CRITERIA[criterion]
    checks = [c for name in suites for c in _suite(name).checks if c.criterion == criterion]
    seconds = sum(c.seconds for c in checks)
    ok, line = _record(criterion, checks, seconds, limit)
    assert ok, line


PROPERTY_RUNS = (
    ("unimodular invariance of brute counts", props.test_counts_invariant_under_unimodular_change),
    ("unimodular invariance of Jordan exponents", props.test_jordan_exponents_invariant),
    ("Hilbert product formula", props.test_hilbert_product_formula),
    ("dual of dual", props.test_dual_of_dual),
    ("random stabilisation witnesses", props.test_stabilisation_witnessed_by_two_levels),
)


class _PropertyCheck:
    def __init__(self, name, passed, error=""):
        self.id, self.passed = name, passed
        self.expected, self.got = "no counterexample", error or "none"


def test_criterion_12():
    checks = []
    start = time.perf_counter()
    for name, run in PROPERTY_RUNS:
        try:
            run()
            checks.append(_PropertyCheck(name, True))
        except AssertionError as exc:
            checks.append(_PropertyCheck(name, False, str(exc).splitlines()[0] if str(exc) else "assertion"))
    checks += [c for c in _suite("densities").checks if c.criterion == 12]
    seconds = time.perf_counter() - start + sum(c.seconds for c in checks if hasattr(c, "seconds"))
    ok, line = _record(12, checks, seconds, 1800)
    assert ok, line
