"""Command-line harness.

Subcommands:
  verify    run the invariant suite (exit 1 on any failure)
  bench     one problem size, one report row per kernel variant
  sweep     element-count sweep with a bandwidth probe per size
  roofline  standalone bandwidth probe and the derived ceiling

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 resource failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench, report
from .verify import run_verify

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


def _add_run_flags(p: argparse.ArgumentParser, sweep: bool) -> None:
    if sweep:
        p.add_argument("--sweep", type=str, default=None,
                       help="comma-separated element counts (default 64,...,4096)")
    p.add_argument("--elements", type=int, default=None,
               help="total element count" + (" (single-size sweep)" if sweep else ""))
    p.add_argument("--degree", type=int, default=9,
                   help="polynomial degree (default 9, i.e. 10 points per dimension)")
    p.add_argument("--iterations", type=int, default=100,
                   help="solver iterations per run (default 100)")
    p.add_argument("--variant", default="all",
                   choices=["reference", "scratch", "layered", "all"])
    p.add_argument("--include-dssum", action="store_true",
                   help="charge interface summation time against the roofline")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=None,
                   help="parallel worker count (default: all available)")
    p.add_argument("--output", type=str, default=None, help="write here instead of stdout")
    p.add_argument("--format", dest="fmt", default="csv",
                   choices=["csv", "json", "gnuplot"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sembench",
                                     description="spectral-element Poisson proxy benchmark")
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run the invariant suite")
    pv.add_argument("--filter", type=str, default=None,
                    help="only properties whose name contains this substring")
    pv.add_argument("--workers", type=int, default=None)

    pb = sub.add_parser("bench", help="benchmark one problem size")
    _add_run_flags(pb, sweep=False)

    ps = sub.add_parser("sweep", help="benchmark an element-count sweep")
    _add_run_flags(ps, sweep=True)

    pr = sub.add_parser("roofline", help="measure bandwidth and the derived ceiling")
    pr.add_argument("--elements", type=int, default=4096)
    pr.add_argument("--degree", type=int, default=9)
    pr.add_argument("--repetitions", type=int, default=10)
    pr.add_argument("--seed", type=int, default=1)
    pr.add_argument("--workers", type=int, default=None)
    pr.add_argument("--output", type=str, default=None)
    pr.add_argument("--format", dest="fmt", default="json", choices=["json"])
    return parser


def _config_from(args: argparse.Namespace, sweep: bool) -> bench.BenchConfig:
    sizes = None
    if sweep and args.sweep is not None:
        try:
            sizes = tuple(int(tok) for tok in args.sweep.split(",") if tok.strip())
        except ValueError as exc:
            raise ValueError(f"bad --sweep list {args.sweep!r}: {exc}") from exc
    return bench.BenchConfig(
        elements=args.elements,
        sweep=sizes,
        degree=args.degree,
        iterations=args.iterations,
        variant=args.variant,
        include_dssum=args.include_dssum,
        seed=args.seed,
        workers=args.workers,
    )


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _emit_rows(rows, fmt: str, output: str | None) -> None:
    if fmt == "csv":
        _emit(report.emit_csv(rows), output)
    elif fmt == "json":
        _emit(report.emit_json(rows), output)
    else:
        _emit(report.emit_gnuplot(rows), output)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            bench.set_workers(args.workers)
            failures = run_verify(args.filter)
            return EXIT_VERIFY_FAILED if failures else EXIT_OK
        if args.command == "bench":
            cfg = _config_from(args, sweep=False)
            if cfg.elements is None:
                raise ValueError("bench requires --elements")
            _emit_rows(bench.run_bench(cfg), args.fmt, args.output)
            return EXIT_OK
        if args.command == "sweep":
            cfg = _config_from(args, sweep=True)
            _emit_rows(bench.run_sweep(cfg), args.fmt, args.output)
            return EXIT_OK
        if args.command == "roofline":
            cfg = bench.BenchConfig(elements=args.elements, degree=args.degree,
                                    seed=args.seed, workers=args.workers,
                                    probe_repetitions=args.repetitions)
            _emit(json.dumps(bench.run_roofline(cfg), indent=2) + "\n", args.output)
            return EXIT_OK
    except (ValueError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MemoryError as exc:
        print(f"resource failure: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
