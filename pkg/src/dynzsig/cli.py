"""Command-line front end: ``dynzsig <command> [options]``.

Exit codes: 0 success, 1 a verification observed a failure, 2 bad input.
Output is a JSON envelope (or CSV for tabular commands) and is
byte-identical for identical arguments.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from . import __version__
from .arith import FactorBudget, is_prime
from .dynseq import (
    Mode,
    build_system,
    rank_of_apparition,
    subsequence_disjointness,
    verify_growth_law,
    zsigmondy_set,
)
from .errors import (
    AlphaPreperiodic,
    BadReduction,
    DegenerateMap,
    DegreeTooSmall,
    DynZsigError,
    GammaNotPeriodic,
    OrbitHitsGamma,
    PeriodOne,
    PolynomialType,
    Undecided,
)
from .heights import (
    archimedean_proximity,
    canonical_height,
    height_constant,
    is_preperiodic,
    norm_growth_report,
    weil_height,
)
from .modp import (
    orbit_mod_p,
    prime_divisor_density,
    strong_conjecture_scan,
    strong_coverage_check,
    tail_cycle_sweep,
    weak_conjecture_scan,
)
from .ratmap import ProjectivePoint, parse_map, parse_point
from .reports import dumps, envelope, rows_to_csv

# which flag to blame when the library rejects the inputs
_BLAME = {
    PolynomialType: "--gamma",
    GammaNotPeriodic: "--gamma",
    PeriodOne: "--gamma",
    AlphaPreperiodic: "--alpha",
    OrbitHitsGamma: "--alpha",
    Undecided: "--alpha",
    DegreeTooSmall: "--map",
    DegenerateMap: "--map",
    BadReduction: "-p",
}


class InputError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"argument {flag}: {message}")


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    seed: int = 0
    fmt: str = "json"
    full_integers: bool = False


# -- argument types ---------------------------------------------------------

def _map_arg(text: str):
    try:
        return parse_map(text)
    except DynZsigError as exc:
        raise argparse.ArgumentTypeError(f"{type(exc).__name__}: {exc}")


def _point_arg(text: str) -> ProjectivePoint:
    try:
        return parse_point(text)
    except (DynZsigError, ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number or inf: {text!r} ({exc})")


def _rational_arg(text: str) -> ProjectivePoint:
    P = _point_arg(text)
    if P.is_infinity:
        raise argparse.ArgumentTypeError("must be a finite rational")
    return P


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _nonnegative_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {v}")
    return v


def _prime_arg(text: str) -> int:
    p = _positive_int(text)
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _target_arg(text: str):
    if text == "alpha":
        return "alpha"
    return _rational_arg(text)


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", required=True, type=_map_arg, help='rational map, e.g. "(z^2+z)" or "z^2/(1+z)"')
    common.add_argument("--seed", type=_nonnegative_int, default=0, help="rho seed (default: 0)")
    common.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    common.add_argument("--full-integers", action="store_true", help="include full decimal A_n")
    common.add_argument("--trial-bound", type=_positive_int, default=None,
                        help="trial-division bound (default: env DYNZSIG_FACTOR_BUDGET or 10^6)")
    common.add_argument("--rho-iterations", type=_nonnegative_int, default=None,
                        help="Brent rho step budget per factorization")

    orbit = argparse.ArgumentParser(add_help=False)
    orbit.add_argument("--alpha", required=True, type=_point_arg, help="starting point")
    orbit.add_argument("--gamma", type=_rational_arg, default=ProjectivePoint(0, 1), help="target (default 0)")
    orbit.add_argument("--mode", choices=("strict", "relaxed"), default="strict")

    parser = argparse.ArgumentParser(prog="dynzsig", description="Primitive divisors in dynamical sequences")
    parser.add_argument("--version", action="version", version=f"dynzsig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zsig", parents=[common, orbit], help="Zsigmondy set of A_n up to N")
    p.add_argument("-N", type=_positive_int, default=10)
    p.add_argument("--track-prime", type=_prime_arg, action="append", default=[], dest="track")
    p.set_defaults(func=cmd_zsig)

    p = sub.add_parser("rank", parents=[common, orbit], help="rank of apparition of p")
    p.add_argument("-p", type=_prime_arg, required=True)
    p.add_argument("-N", type=_positive_int, default=10)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("height", parents=[common], help="canonical height with certified error")
    p.add_argument("--point", required=True, type=_point_arg)
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.add_argument("--max-bits", type=_positive_int, default=8_000_000)
    p.set_defaults(func=cmd_height)

    p = sub.add_parser("growth", parents=[common, orbit], help="log A_n / d^n against the canonical height")
    p.add_argument("-N", type=_positive_int, default=12)
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("modp", parents=[common], help="tail and cycle of alpha mod p")
    p.add_argument("--alpha", required=True, type=_point_arg)
    p.add_argument("-p", type=_prime_arg, required=True)
    p.set_defaults(func=cmd_modp)

    conj = sub.add_parser("conj", help="scans for the Zsigmondy conjectures").add_subparsers(
        dest="which", required=True
    )
    p = conj.add_parser("weak", parents=[common], help="A_n from phi^n(alpha) - alpha")
    p.add_argument("--alpha", required=True, type=_point_arg)
    p.add_argument("-N", type=_positive_int, default=8)
    p.add_argument("--track-prime", type=_prime_arg, action="append", default=[], dest="track")
    p.set_defaults(func=cmd_conj_weak)
    p = conj.add_parser("strong", parents=[common], help="doubly indexed A_{m,n}")
    p.add_argument("--alpha", required=True, type=_point_arg)
    p.add_argument("-M", type=_nonnegative_int, default=4)
    p.add_argument("-N", type=_positive_int, default=4)
    p.add_argument("--pmax", type=_positive_int, default=100, help="coverage check bound")
    p.set_defaults(func=cmd_conj_strong)

    p = sub.add_parser("density", parents=[common], help="primes dividing some term")
    p.add_argument("--alpha", required=True, type=_point_arg)
    p.add_argument("--pmax", type=_positive_int, default=1000)
    p.add_argument("--target", type=_target_arg, default="alpha", help='"alpha" or a rational gamma')
    p.set_defaults(func=cmd_density)

    verify = sub.add_parser("verify", help="checks that exit 1 on failure").add_subparsers(
        dest="which", required=True
    )
    p = verify.add_parser("growth", parents=[common, orbit], help="ord_p A_n = e ord_p A_(n-1)")
    p.add_argument("-N", type=_positive_int, default=8)
    p.add_argument("--pmax", type=_positive_int, default=10**4)
    p.set_defaults(func=cmd_verify_growth)
    p = verify.add_parser("disjoint", parents=[common, orbit], help="period-k subsequence disjointness")
    p.add_argument("-N", type=_positive_int, default=10)
    p.add_argument("--pmax", type=_positive_int, default=10**4, help="small primes listed per class")
    p.set_defaults(func=cmd_verify_disjoint)
    p = verify.add_parser("tailcycle", parents=[common], help="p | A_{m,n} iff m >= rho and sigma | n")
    p.add_argument("--alpha", required=True, type=_point_arg)
    p.add_argument("-M", type=_nonnegative_int, default=6)
    p.add_argument("-N", type=_positive_int, default=6)
    p.add_argument("--pmax", type=_positive_int, default=100, help="check primes p < pmax")
    p.set_defaults(func=cmd_verify_tailcycle)
    return parser


def parse_args(argv=None) -> tuple[RunConfig, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    command = args.command + (f" {args.which}" if getattr(args, "which", None) else "")
    options = {}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "command", "which", "seed", "fmt", "full_integers"):
            continue
        options[k] = v if isinstance(v, (int, float, list, type(None))) else str(v)
    cfg = RunConfig(command, options, args.seed, args.fmt, args.full_integers)
    return cfg, args


def _budget(args) -> FactorBudget:
    base = FactorBudget.from_env(seed=args.seed)
    return FactorBudget(
        trial_bound=args.trial_bound or base.trial_bound,
        rho_iterations=base.rho_iterations if args.rho_iterations is None else args.rho_iterations,
        seed=args.seed,
    )


def _system(args):
    return build_system(args.map, args.alpha, args.gamma, Mode(args.mode))


# -- commands (each returns (result dict, csv text or None, exit code)) -------

def cmd_zsig(args):
    rep = zsigmondy_set(_system(args), args.N, _budget(args), args.track)
    d = rep.to_dict(args.full_integers)
    rows = [(t["n"], t["digits_A"], t["has_primitive"], " ".join(map(str, t["witness_primes"])))
            for t in d["terms"]]
    return d, rows_to_csv(["n", "digits_A", "has_primitive", "witness_primes"], rows), 0


def cmd_rank(args):
    d = rank_of_apparition(_system(args), args.p, args.N).to_dict()
    return d, rows_to_csv(["n", "ord_p"], d["valuations"]), 0


def cmd_height(args):
    phi, P = args.map, args.point
    est = canonical_height(phi, P, tol=args.tol, max_bits=args.max_bits)
    try:
        verdict = is_preperiodic(phi, P).to_dict()
    except Undecided:
        verdict = {"preperiodic": None, "cycle": None, "height_lower_bound": None, "iterations": None}
    d = {
        "kind": "height",
        "map": str(phi),
        "point": str(P),
        "weil_height": float(weil_height(P)),
        "C_phi": float(height_constant(phi).C),
        "estimate": est.to_dict(),
        "preperiodicity": verdict,
    }
    return d, None, 0


def cmd_growth(args):
    sys_ = _system(args)
    rep = norm_growth_report(sys_, args.N, tol=args.tol)
    d = rep.to_dict()
    d["archimedean_proximity"] = [float(x) for x in archimedean_proximity(sys_, args.N)]
    return d, rep.to_csv(), 0


def cmd_modp(args):
    orb = orbit_mod_p(args.map, args.alpha, args.p)
    d = {"kind": "orbit_mod_p", "map": str(args.map), "alpha": str(args.alpha), **orb.to_dict()}
    rows = list(enumerate(d["trajectory"]))
    return d, rows_to_csv(["i", "residue"], rows), 0


def cmd_conj_weak(args):
    rep = weak_conjecture_scan(args.map, args.alpha, args.N, _budget(args), args.track)
    d = rep.to_dict(args.full_integers)
    d["kind"] = "weak_conjecture"
    return d, None, 0


def cmd_conj_strong(args):
    rep = strong_conjecture_scan(args.map, args.alpha, args.M, args.N, _budget(args))
    d = rep.to_dict()
    d["coverage"] = strong_coverage_check(args.map, args.alpha, args.M, args.N, args.pmax)
    rows = [(c["m"], c["n"], c["digits_A"], c["has_primitive"]) for c in d["cells"]]
    return d, rows_to_csv(["m", "n", "digits_A", "has_primitive"], rows), 0


def cmd_density(args):
    survey = prime_divisor_density(args.map, args.alpha, args.pmax, args.target)
    return survey.to_dict(), survey.to_csv(), 0


def cmd_verify_growth(args):
    if args.mode != "strict":
        raise InputError("--mode", "growth-law verification needs strict mode")
    rep = verify_growth_law(_system(args), args.N, args.pmax)
    return rep.to_dict(), None, 0 if rep.passed else 1


def cmd_verify_disjoint(args):
    rep = subsequence_disjointness(_system(args), args.N, args.pmax)
    return rep.to_dict(), None, 0 if rep.passed else 1


def cmd_verify_tailcycle(args):
    sweep = tail_cycle_sweep(args.map, args.alpha, args.M, args.N, args.pmax)
    d = sweep.to_dict()
    rows = [(r["p"], r["rho"], r["sigma"], r["cells_checked"], len(r["mismatches"]), len(r["infinity_cells"]))
            for r in d["primes"]]
    csv_text = rows_to_csv(["p", "rho", "sigma", "cells_checked", "mismatches", "infinity_cells"], rows)
    return d, csv_text, 0 if sweep.passed else 1


def run(cfg: RunConfig, args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    if args.full_integers and hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    try:
        result, csv_text, code = args.func(args)
    except InputError as exc:
        print(f"dynzsig {cfg.command}: error: {exc}", file=sys.stderr)
        return 2
    except DynZsigError as exc:
        flag = _BLAME.get(type(exc), "--map")
        print(f"dynzsig {cfg.command}: error: argument {flag}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if cfg.fmt == "csv":
        if csv_text is None:
            print(f"dynzsig {cfg.command}: error: argument --format: no CSV table for this command",
                  file=sys.stderr)
            return 2
        out.write(csv_text)
    else:
        out.write(dumps(envelope(cfg.command, cfg.options, cfg.seed, result)))
    return code


def main(argv=None) -> int:
    cfg, args = parse_args(argv)
    return run(cfg, args)


if __name__ == "__main__":
    sys.exit(main())
