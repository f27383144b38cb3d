"""Command-line front end: generate, verify, and bench subcommands."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from .generator import (
    GeneratorConfig,
    explore_exploit_percentages,
    generate,
    read_suite,
    write_suite,
)
from .model import ModelError, parse_model
from .tuples import uncovered_after


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caforge",
        description="Covering-array test suite generation and benchmarking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a covering test suite")
    _add_model_flags(gen)
    gen.add_argument("--algo", choices=("atlbo", "tlbo"), default="atlbo")
    gen.add_argument("--pop", type=int, default=40, help="population size")
    gen.add_argument("--iters", type=int, default=None,
                     help="sweeps per commit cycle (default: 100 atlbo, 50 tlbo)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, default=None, help="suite file to write")
    gen.add_argument("--dm-literal", action="store_true",
                     help="diversity normalized by dimension only")
    gen.add_argument("--trace", type=Path, default=None,
                     help="per-update trace CSV")
    gen.add_argument("--fuzzy-diag", type=Path, default=None,
                     help="per-evaluation fuzzy diagnostics CSV")

    ver = sub.add_parser("verify", help="check that a suite file covers its model")
    _add_model_flags(ver)
    ver.add_argument("--suite", type=Path, required=True)

    bch = sub.add_parser("bench", help="run an experiment grid")
    bch.add_argument("--experiments", type=Path, required=True)
    bch.add_argument("--reps", type=int, default=30)
    bch.add_argument("--base-seed", type=int, default=0)
    bch.add_argument("--out", type=Path, required=True, help="results CSV")
    bch.add_argument("--pop", type=int, default=40)
    bch.add_argument("--iters", type=int, default=None)
    return parser


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True,
                        help='model spec, e.g. "2^3 3^2"')
    parser.add_argument("--t", type=int, required=True, help="main strength")
    parser.add_argument("--sub", action="append", default=[], metavar="PARAMS:STRENGTH",
                        help='sub-configuration, e.g. "0-2:3" (repeatable)')


def _parse_cli_model(args):
    subs = []
    for token in args.sub:
        params_text, sep, strength = token.rpartition(":")
        if not sep or not strength.lstrip("-").isdigit():
            raise ModelError(f"bad --sub value {token!r} (expected PARAMS:STRENGTH)")
        subs.append((params_text, int(strength)))
    return parse_model(args.model, args.t, subs)


def _cmd_generate(args) -> int:
    model = _parse_cli_model(args)
    config = GeneratorConfig(
        algorithm=args.algo,
        population_size=args.pop,
        max_iterations=args.iters,
        seed=args.seed,
        dm_literal=args.dm_literal,
    )
    trace = open(args.trace, "w", encoding="utf-8") if args.trace else None
    diag = open(args.fuzzy_diag, "w", encoding="utf-8") if args.fuzzy_diag else None
    try:
        suite, record = generate(model, config, trace=trace, fuzzy_diagnostics=diag)
    finally:
        for fh in (trace, diag):
            if fh is not None:
                fh.close()
    if args.out is not None:
        write_suite(suite, config, args.out)
    explore, exploit = explore_exploit_percentages(record)
    print(f"size={record.suite_size} time_s={record.wall_seconds:.3f}"
          f" explore_pct={explore:.2f} exploit_pct={exploit:.2f}")
    return 0


def _cmd_verify(args) -> int:
    model = _parse_cli_model(args)
    try:
        rows = read_suite(args.suite)
        uncovered = uncovered_after(rows, model)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(f"uncovered={uncovered}")
    return 0 if uncovered == 0 else 1


def _cmd_bench(args) -> int:
    experiments = bench_mod.parse_experiments(
        args.experiments.read_text(encoding="utf-8"))
    results = bench_mod.run_grid(
        experiments, args.reps, args.base_seed,
        population_size=args.pop, max_iterations=args.iters,
    )
    bench_mod.emit_csv(results, args.out)
    bench_mod.emit_phases_csv(results, args.out.parent / "phases.csv")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_err:
        return exit_err.code if isinstance(exit_err.code, int) else 2
    handlers = {
        "generate": _cmd_generate,
        "verify": _cmd_verify,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except (ModelError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
