"""Local Whittaker values and the assembled Fourier coefficient report.

Only finite-place quantities are computed.  Global constants, log p and the
exponential q^T stay symbolic and are emitted as tags.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .density import alpha, alpha_prime, alpha_selfdual, incoherent_exponents, mu
from .errors import (
    DegenerateT,
    FitMismatch,
    InvalidInput,
    NotIncoherentLocal,
    NotNondegenerate,
    SingularMatrix,
    UnsupportedCase,
    UnsupportedLocale,
)
from .hermitian import (
    DiffReport,
    HermitianMatrix,
    SpaceInvariants,
    det_class,
    diff_sets,
    nondegeneracy_report,
    require_odd_inert,
    signature,
    space_invariants,
    vp_rational,
)
from .lattice import GenusRecord, genus_enumerate, lattice_type_at_2, nearly_selfdual_in, r_gen
from .quadfield import FieldContext, hilbert_symbol, kronecker

SYMBOLIC_FACTORS = ("log_p", "q^T", "C")


@dataclass(frozen=True)
class WhittakerValue:
    rational_part: Fraction
    gamma_power: int
    log_p_power: int = 0

    def to_json(self) -> dict:
        out = {
            "rational_part": self.rational_part,
            "gamma_power": self.gamma_power,
            "log_p_power": self.log_p_power,
        }
        if self.log_p_power:
            out["times"] = ["log_p"]
        return out


def _require_unramified_odd(ctx: FieldContext, p: int) -> None:
    if p == 2 or kronecker(ctx.delta, p) == 0:
        raise UnsupportedLocale(f"p = {p} is even or ramified")


def gamma_unit(ctx: FieldContext, v: SpaceInvariants, p: int) -> int:
    """(Delta, det V)_p; both Weil-index factors are 1 at odd unramified p."""
    _require_unramified_odd(ctx, p)
    return hilbert_symbol(ctx.delta, v.det_class, p)


def l_factor_inv(n: int, p: int) -> Fraction:
    out = Fraction(1)
    for i in range(1, n + 1):
        j = n - i + 1
        out *= 1 - Fraction((-1) ** j, p**j)
    return out


def whittaker0(ctx: FieldContext, t: HermitianMatrix, s: HermitianMatrix, p: int) -> WhittakerValue:
    """gamma^n |det S|_p^n alpha_p(S, T) at the centre."""
    require_odd_inert(ctx, p)
    n = t.n
    gamma = gamma_unit(ctx, space_invariants(ctx, s), p)
    abs_det = Fraction(p) ** -vp_rational(det_class(s), p)
    value = alpha(ctx, s, t, p).value
    return WhittakerValue(rational_part=abs_det**n * value, gamma_power=gamma**n)


def whittaker_prime(ctx: FieldContext, t: HermitianMatrix, p: int, cross_check: bool = True) -> WhittakerValue:
    """Central derivative against the self-dual S: alpha_selfdual(n) * mu(a, b), times log p."""
    require_odd_inert(ctx, p)
    try:
        a, b = incoherent_exponents(ctx, t, p)
    except NotIncoherentLocal as exc:
        raise NotNondegenerate(str(exc)) from exc
    n = t.n
    rational = alpha_selfdual(n, p) * mu(a, b, p)
    if cross_check:
        other = alpha_prime(ctx, HermitianMatrix.identity(ctx, n), t, p)
        if other != rational:
            raise FitMismatch(f"derivative routes disagree: {rational} vs {other}")
    gamma = gamma_unit(ctx, space_invariants(ctx, HermitianMatrix.identity(ctx, n)), p)
    return WhittakerValue(rational_part=rational, gamma_power=gamma**n, log_p_power=1)


def volume_ratio(n: int, p: int) -> Fraction:
    if n < 1:
        raise InvalidInput("n must be positive")
    return Fraction(1, p**n) * (1 - Fraction((-1) ** (n + 1), p ** (n + 1))) / (1 - Fraction(1, p * p))


# ---------------------------------------------------------------------------
# coefficient report


@dataclass(frozen=True)
class GenusContribution:
    lattice_type: Optional[str]
    r_gen: Fraction
    classes: int
    mass: Optional[Fraction]
    note: Optional[str] = None

    def to_json(self) -> dict:
        out = {"type": self.lattice_type, "r_gen": self.r_gen, "classes": self.classes, "mass": self.mass}
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class FourierCoefficientReport:
    t: HermitianMatrix
    status: str
    diff: DiffReport
    p: Optional[int] = None
    mu: Optional[Fraction] = None
    r_gen_lprime: Optional[Fraction] = None
    normalized_coefficient: Optional[Fraction] = None
    arithmetic_degree: Optional[Fraction] = None
    genera: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        out = {"T": self.t, "status": self.status, "diff": self.diff.to_json()}
        if self.status == "ramified_support":
            return out
        out.update(
            {
                "p": self.p,
                "mu": self.mu,
                "r_gen_Lprime": self.r_gen_lprime,
                "normalized_coefficient": self.normalized_coefficient,
                "arithmetic_degree": self.arithmetic_degree,
                "times": list(SYMBOLIC_FACTORS),
            }
        )
        if self.genera:
            out["genera"] = [g.to_json() for g in self.genera]
        return out


def _other_genus(ctx: FieldContext, t: HermitianMatrix, lprime_type: Optional[str]) -> Optional[GenusContribution]:
    """The second genus of nearly self-dual lattices that can occur when 2 ramifies and n is even.

    A type II lattice has only even norms, so it cannot represent a T with an
    odd diagonal entry; that contribution is exactly zero.  Other cases would
    need an explicit constructor for the second genus.
    """
    if lprime_type is None or t.n % 2:
        return None
    if lprime_type == "I" and any(Fraction(x).numerator % 2 for x in t.diagonal()):
        return GenusContribution("II", Fraction(0), 0, None, note="odd diagonal entry: no type II representation")
    raise UnsupportedCase("second genus of nearly self-dual lattices at 2 is not constructed for this T")


def coefficient_report(
    ctx: FieldContext, t: HermitianMatrix, aux_primes=None, class_cap: int = 64
) -> FourierCoefficientReport:
    if det_class(t) == 0:
        raise SingularMatrix("det T = 0")
    if not t.is_integral():
        raise InvalidInput("T must have entries in O_k")
    if signature(t) != (t.n, 0):
        raise InvalidInput("T must be positive definite")
    diff = diff_sets(ctx, t)
    if len(diff.diff0) >= 2:
        zero = Fraction(0)
        return FourierCoefficientReport(t, "vanishes_identically", diff, None, zero, zero, zero, zero)
    if not diff.diff0:
        return FourierCoefficientReport(t, "ramified_support", diff)
    (p,) = diff.diff0
    if p == 2:
        raise UnsupportedLocale("p = 2 is not supported")
    report = nondegeneracy_report(ctx, t, p)
    if not report.nondeg:
        raise DegenerateT(f"T is degenerate at {p}; predicted dimension {report.predicted_dim}")
    m = mu(report.a, report.b, p)
    lprime = nearly_selfdual_in(ctx, t, p)
    genus: GenusRecord = genus_enumerate(lprime, aux_primes=aux_primes, class_cap=class_cap)
    r_main = r_gen(t, genus)
    ltype = lattice_type_at_2(lprime) if kronecker(ctx.delta, 2) == 0 else None
    genera = [GenusContribution(ltype, r_main, len(genus.classes), genus.mass)]
    extra = _other_genus(ctx, t, ltype)
    if extra is not None:
        genera.append(extra)
    total = sum((g.r_gen for g in genera), Fraction(0))
    return FourierCoefficientReport(
        t=t,
        status="inert_case",
        diff=diff,
        p=p,
        mu=m,
        r_gen_lprime=r_main,
        normalized_coefficient=m * r_main,
        arithmetic_degree=m * Fraction(ctx.h, ctx.w) * total,
        genera=tuple(genera),
    )
