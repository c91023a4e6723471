"""``grouse`` command-line entry point.

    grouse run <config> [--set key=value ...] [--out dir] [--seed N]
    grouse bench [--d 10] [--n 500 1000 2000 4000] [--density 0.17] [--out dir]
    grouse complete <entries.csv> --rank d [--passes k] [--step C] [--out dir]
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .completion import CompletionProblem, solve_completion
from .config import ConfigError, ExperimentSpec, load_spec
from .engine import StepSchedule, TrackerConfig
from .experiments import resolve_output_dir, run_experiment

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grouse", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a config file")
    run.add_argument("config", type=Path)
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    run.add_argument("--out", type=Path)
    run.add_argument("--seed", type=int)

    bench = sub.add_parser("bench", help="time grouse_step across ambient dimensions")
    bench.add_argument("--d", type=int, default=10)
    bench.add_argument("--n", type=int, nargs="+", default=[500, 1000, 2000, 4000])
    bench.add_argument("--density", type=float, default=0.17)
    bench.add_argument("--steps", type=int, default=2000)
    bench.add_argument("--warmup", type=int, default=200)
    bench.add_argument("--out", type=Path)
    bench.add_argument("--seed", type=int, default=0)

    comp = sub.add_parser("complete", help="complete a matrix from an entry-list CSV")
    comp.add_argument("entries", type=Path)
    comp.add_argument("--rank", type=int, required=True)
    comp.add_argument("--rows", type=int, help="number of rows (default: max row index + 1)")
    comp.add_argument("--cols", type=int, help="number of columns (default: max col index + 1)")
    comp.add_argument("--passes", type=int, default=10)
    comp.add_argument("--step", type=float, default=0.3, help="C in the step size C/t")
    comp.add_argument("--constant-step", action="store_true")
    comp.add_argument("--out", type=Path)
    comp.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_run(args) -> int:
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    spec = load_spec(args.config, overrides)
    print(run_experiment(spec, args.out).line())
    return EXIT_OK


def _cmd_bench(args) -> int:
    spec = ExperimentSpec(
        experiment="bench", d=args.d, n=max(args.n), density=args.density,
        bench_n=tuple(args.n), bench_steps=args.steps, bench_warmup=args.warmup,
        seed=args.seed, output_path="bench-out",
    )
    print(run_experiment(spec, args.out).line())
    return EXIT_OK


def _cmd_complete(args) -> int:
    rows, cols, vals = csvio.read_entries_csv(args.entries)
    if rows.size == 0:
        raise ConfigError("entries: file has no observations")
    n_rows = args.rows or int(rows.max()) + 1
    n_cols = args.cols or int(cols.max()) + 1
    seeds = np.random.SeedSequence(args.seed).generate_state(2)
    problem = CompletionProblem(
        n_rows, n_cols, args.rank, rows, cols, vals, passes=args.passes,
        shuffle_seed=int(seeds[0]), init_seed=int(seeds[1]),
    )
    kind = "constant" if args.constant_step else "diminishing"
    result = solve_completion(problem, TrackerConfig(schedule=StepSchedule(kind, args.step)))
    out = resolve_output_dir(ExperimentSpec(output_path="complete-out"), args.out)
    csvio.write_matrix(out / "reconstruction.csv", result.reconstruction)
    csvio.write_matrix(out / "basis.csv", result.basis.basis)
    csvio.write_matrix(out / "coefficients.csv", result.coefficients)
    csvio.write_table(
        out / "fit_history.csv", ["pass", "observed_rms"],
        [(k + 1, rms) for k, rms in enumerate(result.fit_history)],
    )
    print(
        f"complete: {n_rows}x{n_cols} rank={args.rank} observed={problem.n_observed} "
        f"passes={args.passes} final_observed_rms={result.fit_history[-1]:.4e} "
        f"empty_columns={result.empty_columns.size}"
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "bench": _cmd_bench, "complete": _cmd_complete}[args.command]
    try:
        return handler(args)
    except (ConfigError, TypeError) as exc:
        print(f"grouse: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except csvio.CSVFormatError as exc:
        print(f"grouse: parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"grouse: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"grouse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
