"""Command line front end.

Results go to stdout; diagnostics and traces go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import crt_combine, parse_residues
from .demos import DEMOS, run_demo
from .lift import diagnose_bad_factors, error_tolerant_lift, farey_preimage, gaussian_reduce
from .modframe import RoundsExhausted, RunConfig, groebner_job, run_job
from .poly import GroebnerBasis, clear_denominators, parse_ideal
from .reconstruct import (
    ModularOracle,
    ReconstructionFailed,
    TerminationPolicy,
    reconstruct_rational,
    verify_callback_equality,
)

OUTPUT_FORMAT = 1
log = logging.getLogger("modrecon")


class CliError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def cmd_crt(args) -> int:
    residues = parse_residues(_read(args.file))
    try:
        r = crt_combine(residues)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.json:
        print(json.dumps({"format": OUTPUT_FORMAT, "value": str(r.value), "modulus": str(r.modulus)}))
    else:
        print(f"{r.value} {r.modulus}")
    return 0


def cmd_lift(args) -> int:
    N, r = args.N, args.r
    if N < 2 or not 0 <= r < N:
        raise CliError("need N >= 2 and 0 <= r < N")
    if args.verbose:
        _, _, trace = gaussian_reduce((N, 0), (r, 1))
        for v in trace:
            print(f"trace {v.a} {v.b}", file=sys.stderr)
    if args.lifter == "farey":
        x = farey_preimage(N, r)
        out = {"value": None if x is None else str(x)}
        text = "NONE" if x is None else str(x)
    else:
        res = error_tolerant_lift(N, r)
        if res.outcome is None:
            out, text = {"value": None}, "NONE"
        else:
            diag = diagnose_bad_factors(res, N)
            out = {"value": str(res.outcome), "cofactor": res.cofactor, "bad_factors": diag.factors,
                   "unfactored": diag.remainder}
            text = f"{res.outcome} cofactor {res.cofactor} bad-factors {diag.factors}"
            if diag.remainder > 1:
                text += f" unfactored {diag.remainder}"
    if args.json:
        print(json.dumps({"format": OUTPUT_FORMAT, **out}))
    else:
        print(text)
    return 0


def cmd_reconstruct(args) -> int:
    residues = parse_residues(_read(args.file))
    table = {r.modulus: r.value for r in residues}
    oracle = ModularOracle(table.get, "erroneous" if args.lifter == "errtol" else "exact")
    if args.expect is not None:
        target = Fraction(args.expect)
        policy = TerminationPolicy(verifier=lambda y: verify_callback_equality(y, target), max_primes=len(table))
    elif args.height is not None:
        policy = TerminationPolicy(height_bound=args.height, bad_budget=args.bad_budget, max_primes=len(table))
    else:
        # no acceptance rule: lift once from all residues
        r = crt_combine(residues)
        x = farey_preimage(r.modulus, r.value) if args.lifter == "farey" else error_tolerant_lift(r.modulus, r.value).outcome
        print("NONE" if x is None else x)
        return 0 if x is not None else 1
    try:
        x = reconstruct_rational(oracle, policy, iter(table), args.lifter)
    except ReconstructionFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("NONE")
        return 1
    print(x)
    return 0


def cmd_gb(args) -> int:
    ring, gens = parse_ideal(_read(args.file))
    job = groebner_job(gens, ring)
    if not gens:
        G, report = GroebnerBasis((), ring), None
    else:
        cfg = RunConfig(batch=args.batch, max_rounds=args.max_rounds, seed=args.seed)
        try:
            G, report = run_job(job, cfg)
        except RoundsExhausted as exc:
            print(f"error: {exc}", file=sys.stderr)
            print(exc.report.to_text(), file=sys.stderr)
            return 1
    polys = [clear_denominators(g) if args.clear else g for g in G]
    if args.json:
        doc = {"format": OUTPUT_FORMAT, "basis": [str(g) for g in polys],
               "report": report.to_dict() if report else None}
        print(json.dumps(doc, indent=2))
        return 0
    for g in polys:
        print(g)
    if report is not None:
        print("# report")
        print(report.to_text())
    return 0


def cmd_demo(args) -> int:
    if args.name not in DEMOS:
        raise CliError(f"unknown demo {args.name!r}; choose from {', '.join(DEMOS)}")
    return 0 if run_demo(args.name, sys.stdout, verbose=args.verbose > 0) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    common.add_argument("--batch", type=int, default=4, help="primes per round t (default: 4)")
    common.add_argument("--max-rounds", type=int, default=16, help="round limit (default: 16)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v traces, -vv debug logging")
    lifter = argparse.ArgumentParser(add_help=False)
    lifter.add_argument("--lifter", choices=("farey", "errtol"), default="errtol",
                        help="lifting algorithm (default: errtol)")
    lifter.add_argument("--farey", dest="lifter", action="store_const", const="farey", help="same as --lifter farey")
    lifter.add_argument("--errtol", dest="lifter", action="store_const", const="errtol", help="same as --lifter errtol")

    parser = argparse.ArgumentParser(prog="modrecon", description="Error tolerant rational reconstruction.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} (output format {OUTPUT_FORMAT})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crt", parents=[common], help="combine residues from a file")
    p.add_argument("file", help="residue file ('-' for stdin)")
    p.set_defaults(func=cmd_crt)

    p = sub.add_parser("lift", parents=[common, lifter], help="lift r mod N to a rational")
    p.add_argument("N", type=int)
    p.add_argument("r", type=int)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("reconstruct", parents=[common, lifter], help="reconstruct a rational from prime images")
    p.add_argument("file", help="residue file, one image per prime")
    p.add_argument("--expect", help="accept only this rational (a/b)")
    p.add_argument("--height", type=int, help="a priori bound on max(|a|, |b|)")
    p.add_argument("--bad-budget", type=int, default=1, help="assumed product of bad primes (default: 1)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("gb", parents=[common], help="modular reduced Groebner basis of an ideal file")
    p.add_argument("file", help="ideal file")
    p.add_argument("--clear", action="store_true", help="print integer coprime coefficients")
    p.set_defaults(func=cmd_gb)

    p = sub.add_parser("demo", parents=[common], help=f"run a worked example ({', '.join(DEMOS)})")
    p.add_argument("name")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose >= 2 else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
