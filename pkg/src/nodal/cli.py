"""Command line interface: ``nodal polys|count|check|fit-report|cache``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .bps import InconsistencyError
from .config import Config
from .fit import FitCache, InsufficientGeneratorsError, fit_report
from .nodepoly import DeltaTooLargeError, Engine, count_nodal
from .toric import ChernTuple, SurfaceFileError, load_surface_file

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageFailure(Exception):
    pass


def _config(args) -> Config:
    return Config.from_env(
        max_delta=args.max_delta,
        sample_count=args.samples,
        rng_seed=args.seed,
        cache_path="" if args.no_cache else args.cache,
        thread_count=args.threads,
    )


def _fraction_str(v) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def cmd_polys(args, out) -> int:
    engine = Engine(_config(args))
    polys = [engine.node_polynomial(d, args.force) for d in range(args.delta + 1)]
    if args.format == "json":
        out.write(json.dumps({"polynomials": [p.to_json() for p in polys]}, indent=2) + "\n")
    else:
        for p in polys:
            out.write(p.pretty() + "\n")
    return EXIT_OK


def _parse_chern(text: str) -> ChernTuple:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageFailure(f"--chern expects x,y,z,t; got {text!r}")
    try:
        return ChernTuple(*(int(p) for p in parts))
    except ValueError:
        raise UsageFailure(f"--chern expects four integers; got {text!r}") from None


def cmd_count(args, out) -> int:
    engine = Engine(_config(args))
    if args.surface:
        target = load_surface_file(args.surface)
    else:
        target = _parse_chern(args.chern)
    value, advisory = count_nodal(target, args.delta, engine, args.force)
    out.write(_fraction_str(value) + "\n")
    if advisory is not None and not advisory.ok:
        for w in advisory.warnings:
            print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_check(args, out) -> int:
    from .checks import run_checks

    results = run_checks(args.level, _config(args))
    for r in results:
        out.write(r.line() + "\n")
    failed = [r for r in results if not r.ok]
    out.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_fit_report(args, out) -> int:
    engine = Engine(_config(args), args.variant)
    if args.delta > engine.config.max_delta and not args.force:
        raise DeltaTooLargeError(f"delta={args.delta} exceeds max_delta")
    lib = engine.library(args.delta)
    report = fit_report(args.i, args.delta, lib, engine.localizer)
    out.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK if report.get("full_rank") and "error" not in report else EXIT_FAILED


def cmd_cache(args, out) -> int:
    cache = FitCache(_config(args).cache_path or None)
    if args.action == "clear":
        out.write(f"removed {cache.clear()} entries\n")
    else:
        entries = cache.entries()
        out.write(f"{cache.path}: {len(entries)} entries\n")
        for key in sorted(entries):
            out.write(f"  {key}  ({len(entries[key]['terms'])} terms)\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-delta", type=int, default=None)
    common.add_argument("--samples", type=int, default=None, help="equivariant samples per integral")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--cache", default=None, help="fit cache file")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--threads", type=int, default=None, help="worker processes, 0 = one per CPU")
    common.add_argument("--force", action="store_true", help="allow delta beyond --max-delta")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="nodal", description="Universal node polynomials N_delta(L^2, L.K, K^2, c_2).")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("polys", parents=[common], help="print N_0 .. N_D")
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--format", choices=["pretty", "json"], default="pretty")
    sp.set_defaults(func=cmd_polys)

    sp = sub.add_parser("count", parents=[common], help="evaluate N_delta")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--surface", help="JSON surface description")
    src.add_argument("--chern", help="x,y,z,t")
    sp.add_argument("--delta", type=int, required=True)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("check", parents=[common], help="run validation checks")
    sp.add_argument("--level", choices=["quick", "full"], default="quick")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("fit-report", parents=[common], help="rank and residual diagnostics of one fit")
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--variant", type=int, choices=[0, 1], default=0)
    sp.set_defaults(func=cmd_fit_report)

    sp = sub.add_parser("cache", parents=[common], help="inspect or clear the fit cache")
    sp.add_argument("action", choices=["inspect", "clear"])
    sp.set_defaults(func=cmd_cache)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out)
    except (UsageFailure, SurfaceFileError, DeltaTooLargeError, ValueError) as exc:
        if isinstance(exc, InsufficientGeneratorsError):
            print(f"error: fit failed: {exc}", file=sys.stderr)
            return EXIT_INTERNAL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
