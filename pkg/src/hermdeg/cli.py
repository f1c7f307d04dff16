"""Command-line front end.  Every invocation prints one JSON document."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import density, eisenstein, hermitian, lattice
from .errors import HermdegError, SchemaError
from .io import dumps, parse_hermitian, parse_lattice
from .quadfield import make_field, moduli_component_count
from .suites import verify_suite

EXIT_VERIFY_FAILED = 4


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _lattice_from(args, ctx):
    if args.L is not None:
        return parse_lattice(args.L, ctx)
    if args.T is not None:
        return lattice.standard_lattice(ctx, parse_hermitian(args.T, ctx))
    raise SchemaError("give the lattice with --L or its Gram matrix with --T")


# -- handlers ---------------------------------------------------------------


def field_info(args, ctx):
    out = {
        "delta": ctx.delta,
        "ramified_primes": list(ctx.delta_primes),
        "num_ramified": ctx.num_ramified,
        "h": ctx.h,
        "w": ctx.w,
    }
    if args.n is not None:
        sig = (args.n - 1, 1)
        out["relevant_spaces"] = hermitian.relevant_space_count(ctx, args.n, sig)
        if args.n >= 2:
            out["moduli_components"] = moduli_component_count(ctx, args.n, args.exceptional)
    return out


def herm_invariants(args, ctx):
    return hermitian.space_invariants(ctx, parse_hermitian(args.T, ctx))


def herm_diff(args, ctx):
    return hermitian.diff_sets(ctx, parse_hermitian(args.T, ctx))


def herm_jordan(args, ctx):
    return hermitian.local_jordan_inert(ctx, parse_hermitian(args.T, ctx), args.p)


def herm_nondeg(args, ctx):
    return hermitian.nondegeneracy_report(ctx, parse_hermitian(args.T, ctx), args.p)


def lattice_dual(args, ctx):
    return lattice.dual_lattice(_lattice_from(args, ctx))


def lattice_status(args, ctx):
    return lattice.selfdual_status(_lattice_from(args, ctx))


def lattice_genus(args, ctx):
    return lattice.genus_enumerate(_lattice_from(args, ctx), aux_primes=args.aux, class_cap=args.cap)


def lattice_repcount(args, ctx):
    lat = _lattice_from(args, ctx)
    return {"count": lattice.rep_count(parse_hermitian(args.target, ctx), lat)}


def lattice_nearly(args, ctx):
    lat = lattice.nearly_selfdual_in(ctx, parse_hermitian(args.T, ctx), args.p)
    return {"lattice": lat, "status": lattice.selfdual_status(lat)}


def density_brute(args, ctx):
    s, t = parse_hermitian(args.S, ctx), parse_hermitian(args.T, ctx)
    return density.brute_count(ctx, s, t, args.p, args.k, cache_dir=args.cache)


def density_alpha(args, ctx):
    s, t = parse_hermitian(args.S, ctx), parse_hermitian(args.T, ctx)
    res = density.alpha(ctx, s, t, args.p)
    out = res.to_json()
    out["count"] = density.exact_count(ctx, s, t, args.p, res.k_used)
    return out


def density_poly(args, ctx):
    s, t = parse_hermitian(args.S, ctx), parse_hermitian(args.T, ctx)
    return density.density_poly(ctx, s, t, args.p, deg=args.deg)


def density_prime(args, ctx):
    s, t = parse_hermitian(args.S, ctx), parse_hermitian(args.T, ctx)
    return {"alpha_prime": density.alpha_prime(ctx, s, t, args.p), "kappa": density.derivative_normalization()}


def density_mu(args, ctx):
    return {"mu": density.mu(args.a, args.b, args.p)}


def coeff_whittaker0(args, ctx):
    t, s = parse_hermitian(args.T, ctx), parse_hermitian(args.S, ctx)
    return eisenstein.whittaker0(ctx, t, s, args.p)


def coeff_prime(args, ctx):
    return eisenstein.whittaker_prime(ctx, parse_hermitian(args.T, ctx), args.p, cross_check=not args.no_cross_check)


def coeff_report(args, ctx):
    return eisenstein.coefficient_report(ctx, parse_hermitian(args.T, ctx), aux_primes=args.aux, class_cap=args.cap)


def coeff_volratio(args, ctx):
    return {"volume_ratio": eisenstein.volume_ratio(args.n, args.p)}


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hermdeg", description="Exact hermitian density and lattice computations.")
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, handler, needs_field=True, help_text=None):
        p = group.add_parser(name, help=help_text)
        if needs_field:
            p.add_argument("--delta", type=int, required=True, help="fundamental discriminant of the field")
        p.set_defaults(handler=handler, needs_field=needs_field)
        return p

    field = groups.add_parser("field", help="imaginary quadratic field data").add_subparsers(dest="cmd", required=True)
    p = leaf(field, "info", field_info)
    p.add_argument("--n", type=int)
    p.add_argument("--exceptional", action="store_true", help="exceptional 2-adic case for the component count")

    herm = groups.add_parser("herm", help="hermitian matrices").add_subparsers(dest="cmd", required=True)
    for name, fn, with_p in (
        ("invariants", herm_invariants, False),
        ("diff", herm_diff, False),
        ("jordan", herm_jordan, True),
        ("nondeg", herm_nondeg, True),
    ):
        p = leaf(herm, name, fn)
        p.add_argument("--T", required=True, help="hermitian matrix as JSON")
        if with_p:
            p.add_argument("--p", type=int, required=True)

    lat = groups.add_parser("lattice", help="hermitian lattices").add_subparsers(dest="cmd", required=True)
    for name, fn in (
        ("dual", lattice_dual),
        ("status", lattice_status),
        ("genus", lattice_genus),
        ("repcount", lattice_repcount),
    ):
        p = leaf(lat, name, fn)
        p.add_argument("--L", help="lattice as JSON")
        p.add_argument("--T", help="Gram matrix of the standard lattice")
        if name == "genus":
            p.add_argument("--aux", type=_int_list, help="auxiliary split primes, comma separated")
            p.add_argument("--cap", type=int, default=64)
        if name == "repcount":
            p.add_argument("--target", required=True, help="target Gram matrix as JSON")
    p = leaf(lat, "nearly", lattice_nearly)
    p.add_argument("--T", required=True)
    p.add_argument("--p", type=int, required=True)

    dens = groups.add_parser("density", help="local representation densities").add_subparsers(dest="cmd", required=True)
    for name, fn in (("brute", density_brute), ("alpha", density_alpha), ("poly", density_poly), ("prime", density_prime)):
        p = leaf(dens, name, fn)
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--S", required=True)
        p.add_argument("--T", required=True)
        if name == "brute":
            p.add_argument("--k", type=int, required=True)
            p.add_argument("--cache", help="directory for memoised counts")
        if name == "poly":
            p.add_argument("--deg", type=int)
    p = leaf(dens, "mu", density_mu, needs_field=False)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--p", type=int, required=True)

    coeff = groups.add_parser("coeff", help="Whittaker values and Fourier coefficients").add_subparsers(
        dest="cmd", required=True
    )
    p = leaf(coeff, "whittaker0", coeff_whittaker0)
    p.add_argument("--T", required=True)
    p.add_argument("--S", required=True)
    p.add_argument("--p", type=int, required=True)
    p = leaf(coeff, "prime", coeff_prime)
    p.add_argument("--T", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--no-cross-check", action="store_true", help="skip the density-polynomial route")
    p = leaf(coeff, "report", coeff_report)
    p.add_argument("--T", required=True)
    p.add_argument("--aux", type=_int_list)
    p.add_argument("--cap", type=int, default=64)
    p = leaf(coeff, "volratio", coeff_volratio, needs_field=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)

    verify = groups.add_parser("verify", help="run a bundled verification suite")
    verify.add_argument("suite", help="field, densities, derivative, lattice, maintheorem or all")
    verify.set_defaults(handler=None, needs_field=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.group == "verify":
            results = verify_suite(args.suite)
            if len(results) == 1:
                doc = results[0]
            else:
                doc = {"suite": "all", "results": results, "all_pass": all(r.all_pass for r in results)}
            print(dumps(doc))
            return 0 if all(r.all_pass for r in results) else EXIT_VERIFY_FAILED
        ctx = make_field(args.delta) if args.needs_field else None
        print(dumps(args.handler(args, ctx)))
        return 0
    except HermdegError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
