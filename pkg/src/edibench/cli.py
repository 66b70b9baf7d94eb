"""Command-line front end.

Subcommands map onto the harness entry points: `calibrate` runs the 8
boundary layouts, `sweep` one parameterized family, `efficiency` the
sample-size and timing protocols, `agree` the metric-agreement analysis
over ingested representation files, `score` a single representation file,
and `gen` dumps a synthetic representation to CSV.

Exit codes: 0 success, 1 usage error (no partial output files), 2 runtime
failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .core import (
    read_representation_csv,
    write_representation_csv,
    write_results_csv,
)
from .errors import EdiBenchError
from .estimators import EstimatorChoice
from .harness import (
    ExperimentConfig,
    agreement_matrix,
    evaluate_metrics,
    resolve_metrics,
    rows_to_score_table,
    run_experiment,
    sample_efficiency,
    time_complexity,
    write_agreement_csv,
)
from .synth import BOUNDARY_CASES, BoundaryCase, SweepSpec, gen_boundary, gen_sweep

DESK_N = 20000
DESK_REPS = 5
DESK_SEEDS = 10
PAPER_N = 50000
PAPER_REPS = 50
PAPER_SEEDS = 50

TIMING_SIZES = (1000, 10000, 100000)
SUBSET_SIZES = (100, 1000, 10000)
EFFICIENCY_N = 100000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures routed to exit code 1."""

    def error(self, message):
        raise UsageError(message)


def _parse_alphas(text: str) -> tuple[float, ...]:
    try:
        if ":" in text:
            lo_s, hi_s, step_s = text.split(":")
            lo, hi, step = float(lo_s), float(hi_s), float(step_s)
            if step <= 0 or hi < lo:
                raise ValueError("need lo <= hi and step > 0")
            out = []
            value = lo
            while value <= hi + 1e-9:
                out.append(round(value, 12))
                value += step
            return tuple(out)
        return (float(text),)
    except ValueError as exc:
        raise UsageError(f"--alphas: {exc}")


def _parse_estimator(text: str) -> EstimatorChoice:
    try:
        return EstimatorChoice.parse(text)
    except ValueError as exc:
        raise UsageError(f"--estimator: {exc}")


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--sizes: {exc}")
    if not sizes:
        raise UsageError("--sizes: empty list")
    return sizes


def _master_seed(args) -> int:
    if args.master_seed is not None:
        return args.master_seed
    env = os.environ.get("EDIBENCH_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"EDIBENCH_SEED must be an integer, got {env!r}")
    return 0


def _add_common(parser, *, n_default=DESK_N):
    parser.add_argument("--n", type=int, default=n_default,
                        help="samples per representation (default %(default)s)")
    parser.add_argument("--reps", type=int, default=DESK_REPS, metavar="M",
                        help="representations per grid point (default %(default)s)")
    parser.add_argument("--seeds", type=int, default=DESK_SEEDS, metavar="S",
                        help="number of seeds, used as 0..S-1 (default %(default)s)")
    parser.add_argument("--metrics", default="all",
                        help="comma-separated metric names or 'all' (default %(default)s)")
    parser.add_argument("--estimator", default="discrete",
                        help="discrete | binned[:B] | ksg[:K] | dv (default %(default)s)")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--paper-scale", action="store_true",
                        help=f"use N={PAPER_N}, M={PAPER_REPS}, S={PAPER_SEEDS}")
    parser.add_argument("--master-seed", type=int, default=None,
                        help="root seed (default: $EDIBENCH_SEED or 0)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel worker processes (default %(default)s)")


def build_parser() -> _Parser:
    parser = _Parser(prog="edibench",
                     description="Disentanglement metrics benchmark harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="run the 8 boundary layouts")
    _add_common(p)

    p = sub.add_parser("sweep", help="run one parameterized sweep family")
    p.add_argument("--family", required=True,
                   choices=("nonlinear", "rotation", "noise"))
    p.add_argument("--alphas", default="0:1:0.2",
                   help="lo:hi:step or single value (default %(default)s)")
    _add_common(p)

    p = sub.add_parser("efficiency",
                       help="sample-size deltas and timing slopes")
    p.add_argument("--family", default="rotation",
                   choices=("nonlinear", "rotation", "noise"),
                   help="family used for the timing protocol (default %(default)s)")
    p.add_argument("--alphas", default="0.3",
                   help="alpha for the timing representation (default %(default)s)")
    p.add_argument("--timing-sizes", default=",".join(map(str, TIMING_SIZES)),
                   help="comma list for the timing grid (default %(default)s)")
    p.add_argument("--subset-sizes", default=",".join(map(str, SUBSET_SIZES)),
                   help="comma list for the score-delta grid (default %(default)s)")
    p.add_argument("--timing-metrics", default="edi,dciforest",
                   help="metrics timed on the sweep family (default %(default)s)")
    _add_common(p, n_default=EFFICIENCY_N)

    p = sub.add_parser("agree",
                       help="metric-agreement matrix over representation files")
    p.add_argument("--input-dir", required=True,
                   help="directory of representation CSVs with .kinds.json sidecars")
    p.add_argument("--metrics", default="all")
    p.add_argument("--estimator", default="binned")
    p.add_argument("--out", required=True)
    p.add_argument("--master-seed", type=int, default=None)

    p = sub.add_parser("score", help="score one representation file")
    p.add_argument("--input", required=True)
    p.add_argument("--kinds", required=True)
    p.add_argument("--metrics", default="all")
    p.add_argument("--estimator", default="binned")
    p.add_argument("--out", required=True)
    p.add_argument("--master-seed", type=int, default=None)

    p = sub.add_parser("gen", help="dump one synthetic representation")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--case", choices=BOUNDARY_CASES)
    group.add_argument("--family", choices=("nonlinear", "rotation", "noise"))
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--n", type=int, default=DESK_N)
    p.add_argument("--out", required=True)
    p.add_argument("--master-seed", type=int, default=None)
    return parser


def _scale(args):
    if args.paper_scale:
        return PAPER_N, PAPER_REPS, PAPER_SEEDS
    return args.n, args.reps, args.seeds


def _write_outputs(out_path: str, rows, errors) -> None:
    write_results_csv(rows, out_path)
    if errors:
        with open(f"{out_path}.errors.log", "w") as fh:
            fh.write("\n".join(errors) + "\n")


def _grid_config(args, experiment: str, alphas=(0.0,)) -> ExperimentConfig:
    n, reps, seed_count = _scale(args)
    return ExperimentConfig(
        experiment=experiment, alphas=alphas, n=n, reps_per_alpha=reps,
        seeds=tuple(range(seed_count)),
        metrics=tuple(args.metrics.split(",")),
        estimator=_parse_estimator(args.estimator),
        output_path=args.out, master_seed=_master_seed(args), jobs=args.jobs)


def _cmd_calibrate(args) -> int:
    rows, errors = run_experiment(_grid_config(args, "calibrate"))
    _write_outputs(args.out, rows, errors)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _grid_config(args, args.family, alphas=_parse_alphas(args.alphas))
    rows, errors = run_experiment(cfg)
    _write_outputs(args.out, rows, errors)
    return 0


def _cmd_efficiency(args) -> int:
    master = _master_seed(args)
    n, _, seed_count = _scale(args)
    estimator = _parse_estimator(args.estimator)
    subset_cfg = ExperimentConfig(
        experiment="calibrate", n=n, seeds=tuple(range(seed_count)),
        metrics=tuple(args.metrics.split(",")), estimator=estimator,
        master_seed=master)
    rows, errors = sample_efficiency(subset_cfg, _parse_sizes(args.subset_sizes))
    timing_cfg = ExperimentConfig(
        experiment=args.family, alphas=_parse_alphas(args.alphas), n=n,
        seeds=(0,), metrics=tuple(args.timing_metrics.split(",")),
        estimator=EstimatorChoice(kind="ksg"), master_seed=master)
    timing_rows, timing_errors = time_complexity(
        timing_cfg, _parse_sizes(args.timing_sizes))
    _write_outputs(args.out, rows + timing_rows, errors + timing_errors)
    return 0


def _rep_files(input_dir: str):
    root = Path(input_dir)
    if not root.is_dir():
        raise UsageError(f"--input-dir: {input_dir} is not a directory")
    pairs = []
    for csv_path in sorted(root.glob("*.csv")):
        kinds = csv_path.parent / (csv_path.stem + ".kinds.json")
        if kinds.exists():
            pairs.append((csv_path, kinds))
    if not pairs:
        raise UsageError(
            f"--input-dir: no representation CSVs with .kinds.json sidecars"
            f" in {input_dir}")
    return pairs


def _cmd_agree(args) -> int:
    metrics = resolve_metrics(tuple(args.metrics.split(",")))
    estimator = _parse_estimator(args.estimator)
    master = _master_seed(args)
    rows = []
    errors = []
    for index, (csv_path, kinds_path) in enumerate(_rep_files(args.input_dir)):
        rep = read_representation_csv(csv_path, kinds_path, seed=master)
        rep_rows, rep_errors = evaluate_metrics(
            rep, metrics, estimator, master, experiment="agree",
            rep_index=index)
        rows.extend(rep_rows)
        errors.extend(f"{csv_path.name}: {e}" for e in rep_errors)
    labels, matrix = agreement_matrix(rows_to_score_table(rows))
    write_agreement_csv(labels, matrix, args.out)
    if errors:
        with open(f"{args.out}.errors.log", "w") as fh:
            fh.write("\n".join(errors) + "\n")
    return 0


def _cmd_score(args) -> int:
    rep = read_representation_csv(args.input, args.kinds,
                                  seed=_master_seed(args))
    rows, errors = evaluate_metrics(
        rep, resolve_metrics(tuple(args.metrics.split(","))),
        _parse_estimator(args.estimator), _master_seed(args),
        experiment="score")
    _write_outputs(args.out, rows, errors)
    return 0


def _cmd_gen(args) -> int:
    seed = _master_seed(args)
    if args.case is not None:
        rep = gen_boundary(BoundaryCase(args.case), args.n, seed)
    else:
        rep = gen_sweep(SweepSpec(args.family, args.alpha, n=args.n, seed=seed))
    out = Path(args.out)
    kinds_path = out.parent / (out.stem + ".kinds.json")
    write_representation_csv(rep, out, kinds_path)
    return 0


_COMMANDS = {
    "calibrate": _cmd_calibrate,
    "sweep": _cmd_sweep,
    "efficiency": _cmd_efficiency,
    "agree": _cmd_agree,
    "score": _cmd_score,
    "gen": _cmd_gen,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EdiBenchError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
