"""Experiment orchestration: sweeps, seed aggregation, timing, sample-size
deltas and metric-agreement analysis.

A run is a grid of independent cells (case-or-alpha x seed x repetition);
each cell generates one synthetic representation and evaluates the selected
metrics on it.  Cell seeds derive from the master seed with a fixed mixing
function, so serial and parallel executions produce identical rows.  Failed
metric evaluations never reach the results; they are collected separately
so the caller can write them to an error log.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import spearmanr

from .core import Representation, ResultRow
from .errors import (
    EdiBenchError,
    InvalidCase,
    LengthMismatch,
    MissingMetric,
    TooFewRequested,
    TooFewSamples,
)
from .estimators import EstimatorChoice
from .metrics_classic import (
    DciConfig,
    InterventionConfig,
    dci,
    dcimig,
    mig,
    mig_sup,
    modularity_score,
    pairwise_mi_matrix,
    sap,
    zdiff,
    zminvar,
)
from .metrics_edi import edi_report
from .seeding import mix64
from .synth import (
    BOUNDARY_CASES,
    BoundaryCase,
    SweepSpec,
    gen_boundary,
    gen_sweep,
    subsample,
)

EXPERIMENTS = ("calibrate", "nonlinear", "rotation", "noise", "efficiency",
               "agree", "score")

# DCI component names map onto the taxonomy axes the three scores measure
_DCI_COMPONENTS = ("Modularity", "Compactness", "Explicitness")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    alphas: tuple[float, ...] = (0.0,)
    n: int = 20000
    reps_per_alpha: int = 1
    seeds: tuple[int, ...] = (0,)
    metrics: tuple[str, ...] = ("all",)
    estimator: EstimatorChoice = field(default_factory=EstimatorChoice)
    output_path: str | None = None
    master_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if self.experiment not in EXPERIMENTS:
            raise InvalidCase(f"experiment must be one of {EXPERIMENTS}")
        if any(not 0.0 <= a <= 1.0 for a in self.alphas):
            raise InvalidCase("alphas must lie in [0, 1]")
        if not self.seeds:
            raise InvalidCase("seeds must be nonempty")
        if self.n <= 0 or self.reps_per_alpha <= 0 or self.jobs <= 0:
            raise InvalidCase("n, reps_per_alpha, jobs must be positive")


# -- metric registry ---------------------------------------------------------

def _eval_edi(rep, choice, seed):
    report = edi_report(rep, choice, choice)
    return [("edi", c, v) for _, c, v in report.entries]


def _eval_zdiff(rep, choice, seed):
    return [("zdiff", "Single", zdiff(rep, InterventionConfig(seed=seed)))]


def _eval_zminvar(rep, choice, seed):
    return [("zminvar", "Single", zminvar(rep, InterventionConfig(seed=seed)))]


def _eval_sap(rep, choice, seed):
    return [("sap", "Single", sap(rep, seed=seed))]


def _eval_dci(rep, choice, seed):
    scores = dci(rep, DciConfig(seed=seed))
    return [("dci", c, v) for c, v in zip(_DCI_COMPONENTS, scores)]


def _eval_dci_forest(rep, choice, seed):
    scores = dci(rep, DciConfig(seed=seed, model="forest"))
    return [("dciforest", c, v) for c, v in zip(_DCI_COMPONENTS, scores)]


def _eval_mig(rep, choice, seed, mi_matrix=None):
    return [("mig", "Single", mig(rep, choice, mi_matrix))]


def _eval_migsup(rep, choice, seed, mi_matrix=None):
    return [("migsup", "Single", mig_sup(rep, choice, mi_matrix))]


def _eval_modularity(rep, choice, seed, mi_matrix=None):
    return [("modularity", "Single", modularity_score(rep, choice, mi_matrix))]


def _eval_dcimig(rep, choice, seed, mi_matrix=None):
    return [("dcimig", "Single", dcimig(rep, choice, mi_matrix))]


# metrics whose evaluators can share one pairwise-MI matrix per cell
_MI_MATRIX_METRICS = ("mig", "migsup", "modularity", "dcimig")

METRIC_REGISTRY = {
    "edi": _eval_edi,
    "zdiff": _eval_zdiff,
    "zminvar": _eval_zminvar,
    "sap": _eval_sap,
    "mig": _eval_mig,
    "migsup": _eval_migsup,
    "modularity": _eval_modularity,
    "dci": _eval_dci,
    "dcimig": _eval_dcimig,
    # timing-oriented tree-ensemble backend, not part of "all"
    "dciforest": _eval_dci_forest,
}

DEFAULT_METRICS = ("edi", "zdiff", "zminvar", "sap", "mig", "migsup",
                   "modularity", "dci", "dcimig")


def resolve_metrics(names) -> tuple[str, ...]:
    names = tuple(names)
    if names == ("all",):
        return DEFAULT_METRICS
    for name in names:
        if name not in METRIC_REGISTRY:
            raise MissingMetric(
                f"unknown metric {name!r}; known: {sorted(METRIC_REGISTRY)}")
    return names


# -- cell execution ----------------------------------------------------------

@dataclass(frozen=True)
class _Cell:
    experiment: str   # row tag, e.g. "calibrate#101" or "rotation"
    family: str       # boundary case code or sweep family
    alpha: float
    n: int
    data_seed: int
    seed: int         # the user-facing seed this cell belongs to
    rep_index: int
    metrics: tuple[str, ...]
    estimator: EstimatorChoice


def _generate(cell: _Cell) -> Representation:
    if cell.family in BOUNDARY_CASES:
        return gen_boundary(BoundaryCase(cell.family), cell.n, cell.data_seed)
    return gen_sweep(SweepSpec(cell.family, cell.alpha, n=cell.n,
                               seed=cell.data_seed))


def evaluate_metrics(rep: Representation, metrics, choice: EstimatorChoice,
                     seed: int, experiment: str = "score", alpha: float = 0.0,
                     rep_index: int = 0, share_mi_matrix: bool = True,
                     row_seed: int | None = None):
    """Run the named metrics on one representation.

    `seed` drives the stochastic parts of the metrics; `row_seed` (default:
    `seed`) is what the output rows report, so grid runs can show the
    user-facing seed rather than the derived per-cell one.  Returns (rows,
    errors); errors are human-readable strings and the corresponding rows
    are simply absent.
    """
    row_seed = seed if row_seed is None else row_seed
    rows: list[ResultRow] = []
    errors: list[str] = []
    mi_matrix = None
    if share_mi_matrix and sum(m in _MI_MATRIX_METRICS for m in metrics) > 1:
        try:
            mi_matrix = pairwise_mi_matrix(rep, choice)
        except EdiBenchError as exc:
            errors.append(f"{experiment} alpha={alpha} seed={seed} "
                          f"rep={rep_index} pairwise-mi: {type(exc).__name__}: {exc}")
    for name in metrics:
        fn = METRIC_REGISTRY[name]
        start = time.monotonic()
        try:
            if name in _MI_MATRIX_METRICS:
                triples = fn(rep, choice, seed, mi_matrix)
            else:
                triples = fn(rep, choice, seed)
        except EdiBenchError as exc:
            errors.append(f"{experiment} alpha={alpha} seed={seed} "
                          f"rep={rep_index} {name}: {type(exc).__name__}: {exc}")
            continue
        elapsed_ms = (time.monotonic() - start) * 1000.0
        for metric, component, value in triples:
            rows.append(ResultRow(experiment=experiment, alpha=alpha,
                                  seed=row_seed, rep_index=rep_index,
                                  metric=metric, component=component,
                                  value=value, elapsed_ms=elapsed_ms))
    return rows, errors


def _run_cell(cell: _Cell):
    rep = _generate(cell)
    return evaluate_metrics(rep, cell.metrics, cell.estimator, cell.data_seed,
                            experiment=cell.experiment, alpha=cell.alpha,
                            rep_index=cell.rep_index, row_seed=cell.seed)


def _build_cells(cfg: ExperimentConfig) -> list[_Cell]:
    metrics = resolve_metrics(cfg.metrics)
    cells = []
    if cfg.experiment == "calibrate":
        layouts = [(f"calibrate#{code}", code, 0.0, idx)
                   for idx, code in enumerate(BOUNDARY_CASES)]
    else:
        layouts = [(cfg.experiment, cfg.experiment, alpha, idx)
                   for idx, alpha in enumerate(cfg.alphas)]
    for tag, family, alpha, alpha_idx in layouts:
        for seed in cfg.seeds:
            for m in range(cfg.reps_per_alpha):
                data_seed = mix64(cfg.master_seed, cfg.experiment,
                                  alpha_idx, seed, m)
                cells.append(_Cell(experiment=tag, family=family, alpha=alpha,
                                   n=cfg.n, data_seed=data_seed, seed=seed,
                                   rep_index=m, metrics=metrics,
                                   estimator=cfg.estimator))
    return cells


def run_experiment(cfg: ExperimentConfig):
    """Execute all cells (optionally in parallel) and collect rows + errors."""
    if cfg.experiment in ("efficiency", "agree", "score"):
        raise InvalidCase(
            f"{cfg.experiment!r} is not a grid experiment; use the dedicated"
            " entry point")
    cells = _build_cells(cfg)
    rows: list[ResultRow] = []
    errors: list[str] = []
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            for cell_rows, cell_errors in pool.map(_run_cell, cells):
                rows.extend(cell_rows)
                errors.extend(cell_errors)
    else:
        for cell in cells:
            cell_rows, cell_errors = _run_cell(cell)
            rows.extend(cell_rows)
            errors.extend(cell_errors)
    return rows, errors


# -- aggregation -------------------------------------------------------------

@dataclass(frozen=True)
class AggregateCell:
    experiment: str
    alpha: float
    metric: str
    component: str
    mean: float
    std: float
    count: int

    def __post_init__(self):
        if self.std < 0 or self.count <= 0:
            raise InvalidCase("std must be nonnegative and count positive")


def aggregate(rows) -> list[AggregateCell]:
    """Mean/unbiased-std of values grouped by (experiment, alpha, metric,
    component), in first-appearance order."""
    groups: dict[tuple, list[float]] = {}
    for r in rows:
        groups.setdefault((r.experiment, r.alpha, r.metric, r.component),
                          []).append(r.value)
    out = []
    for (experiment, alpha, metric, component), values in groups.items():
        arr = np.asarray(values, dtype=float)
        std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
        out.append(AggregateCell(experiment=experiment, alpha=alpha,
                                 metric=metric, component=component,
                                 mean=float(arr.mean()), std=std,
                                 count=len(arr)))
    return out


# -- sample efficiency and timing -------------------------------------------

def _efficiency_base(cfg: ExperimentConfig, seed: int,
                     dims: int | None = None) -> Representation:
    """Full-size representation for the efficiency protocols.

    `dims` overrides the sweep families' factor/code count (boundary cases
    have fixed geometry and ignore it).
    """
    if cfg.experiment == "calibrate":
        family, alpha = "111", 0.0
    else:
        family, alpha = cfg.experiment, (cfg.alphas[0] if cfg.alphas else 0.0)
    data_seed = mix64(cfg.master_seed, "efficiency", family, seed)
    if family in BOUNDARY_CASES:
        return gen_boundary(BoundaryCase(family), cfg.n, data_seed)
    spec = (SweepSpec(family, alpha, n=cfg.n, seed=data_seed) if dims is None
            else SweepSpec(family, alpha, k=dims, d=dims, n=cfg.n,
                           seed=data_seed))
    return gen_sweep(spec)


def sample_efficiency(cfg: ExperimentConfig, sizes):
    """|score(subset) - score(full)| per metric and size, averaged over
    cfg.seeds.  The subset size travels in the rep_index column."""
    sizes = [int(s) for s in sizes]
    if any(s > cfg.n for s in sizes):
        raise TooFewRequested(f"sizes must not exceed n={cfg.n}")
    metrics = resolve_metrics(cfg.metrics)
    deltas: dict[tuple, list[float]] = {}
    errors: list[str] = []
    for seed in cfg.seeds:
        base = _efficiency_base(cfg, seed)
        full_rows, errs = evaluate_metrics(base, metrics, cfg.estimator, seed)
        errors.extend(errs)
        full = {(r.metric, r.component): r.value for r in full_rows}
        for size in sizes:
            sub = subsample(base, size, mix64(cfg.master_seed, "subset", seed, size))
            sub_rows, errs = evaluate_metrics(sub, metrics, cfg.estimator, seed)
            errors.extend(errs)
            for r in sub_rows:
                key = (r.metric, r.component)
                if key in full:
                    deltas.setdefault((size, r.metric, r.component),
                                      []).append(abs(r.value - full[key]))
    rows = [ResultRow(experiment="efficiency", alpha=0.0, seed=0,
                      rep_index=size, metric=metric, component=component,
                      value=float(np.mean(vals)))
            for (size, metric, component), vals in deltas.items()]
    return rows, errors


def fit_loglog_slope(sizes, times) -> float:
    """Least-squares slope of log(time) against log(size)."""
    sizes = np.asarray(sizes, dtype=float)
    times = np.maximum(np.asarray(times, dtype=float), 1e-9)
    return float(np.polyfit(np.log(sizes), np.log(times), 1)[0])


def time_complexity(cfg: ExperimentConfig, sizes, repeats: int = 3):
    """Wall time per (metric, size) plus a fitted log-log slope per metric.

    Every (metric, size) cell reports the fastest of `repeats` runs on a
    monotonic clock, executed serially with repeats interleaved across
    metrics. Scheduler preemption and allocator warmup only ever add time,
    so the minimum is the least-contaminated observation, and interleaving
    turns slow host phases into common-mode noise that cancels out of
    slope comparisons. The size travels in the rep_index column; slope
    rows use component "slope" and rep_index 0.

    Sweep-family bases are generated at 2 factors / 2 codes: the question
    being measured is how cost grows with the sample count, and the small
    fixed geometry keeps the per-pair estimator cost in its asymptotic
    regime rather than the d-dimensional-neighbor-search regime, where the
    k-NN metric and the tree ensemble are indistinguishable within host
    noise.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) < 3 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidCase("need at least 3 strictly increasing sizes")
    if sizes[-1] > cfg.n:
        raise TooFewRequested(f"sizes must not exceed n={cfg.n}")
    metrics = resolve_metrics(cfg.metrics)
    seed = cfg.seeds[0]
    base = _efficiency_base(cfg, seed, dims=2)
    rows: list[ResultRow] = []
    errors: list[str] = []
    times: dict[str, list[float]] = {name: [] for name in metrics}
    for size in sizes:
        sub = subsample(base, size, mix64(cfg.master_seed, "timing", seed, size))
        samples: dict[str, list[float]] = {name: [] for name in metrics}
        failed: dict[str, EdiBenchError] = {}
        # repeats are interleaved across metrics so slow host phases hit
        # every metric alike and cancel out of slope comparisons
        for _ in range(repeats):
            for name in metrics:
                if name in failed:
                    continue
                start = time.monotonic()
                try:
                    # timing covers the full metric evaluation, shared-nothing
                    evaluate_metrics(sub, (name,), cfg.estimator, seed,
                                     share_mi_matrix=False)
                except EdiBenchError as exc:
                    failed[name] = exc
                    continue
                samples[name].append(time.monotonic() - start)
        for name in metrics:
            if name in failed:
                errors.append(f"timing size={size} {name}: "
                              f"{type(failed[name]).__name__}: {failed[name]}")
                continue
            best = float(min(samples[name]))
            times[name].append(best)
            rows.append(ResultRow(experiment="timing", alpha=0.0, seed=seed,
                                  rep_index=size, metric=name,
                                  component="Single", value=best,
                                  elapsed_ms=best * 1000.0))
    for name in metrics:
        if len(times[name]) == len(sizes):
            rows.append(ResultRow(experiment="timing", alpha=0.0, seed=seed,
                                  rep_index=0, metric=name, component="slope",
                                  value=fit_loglog_slope(sizes, times[name])))
    return rows, errors


# -- agreement ---------------------------------------------------------------

def spearman_rho(a, b) -> float:
    """Spearman rank correlation in [-1, 1]; 0 when a ranking is constant."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} vs {len(b)} values")
    if len(a) < 2:
        raise TooFewSamples("spearman_rho needs at least 2 pairs")
    rho = spearmanr(a, b).statistic
    if not math.isfinite(rho):
        return 0.0
    return float(min(1.0, max(-1.0, rho)))


def agreement_matrix(scores: dict[str, list[float]]):
    """Pairwise Spearman correlations between metric score vectors.

    `scores` maps a metric label to its scores across a common list of
    representations.  Returns (labels, matrix) with a unit diagonal.
    """
    labels = list(scores)
    if not labels:
        raise TooFewSamples("agreement_matrix needs at least one metric")
    lengths = {len(v) for v in scores.values()}
    if len(lengths) != 1:
        raise LengthMismatch(f"score vectors differ in length: {sorted(lengths)}")
    m = len(labels)
    matrix = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            rho = spearman_rho(scores[labels[i]], scores[labels[j]])
            matrix[i, j] = matrix[j, i] = rho
    return labels, matrix


def write_agreement_csv(labels, matrix, path) -> None:
    matrix = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(["metric", *labels]) + "\n")
        for label, row in zip(labels, matrix):
            fh.write(",".join([label, *(format(v, ".12g") for v in row)]) + "\n")


def rows_to_score_table(rows) -> dict[str, list[float]]:
    """Pivot result rows into per-metric score vectors ordered by
    (experiment, alpha, seed, rep_index)."""
    cells = sorted({(r.experiment, r.alpha, r.seed, r.rep_index) for r in rows})
    index = {cell: pos for pos, cell in enumerate(cells)}
    table: dict[str, list[float | None]] = {}
    for r in rows:
        label = r.metric if r.component == "Single" else f"{r.metric}.{r.component}"
        column = table.setdefault(label, [None] * len(cells))
        column[index[(r.experiment, r.alpha, r.seed, r.rep_index)]] = r.value
    complete = {}
    for label, column in table.items():
        if all(v is not None for v in column):
            complete[label] = [float(v) for v in column]
    if not complete:
        raise TooFewSamples("no metric has a complete score vector")
    return complete
