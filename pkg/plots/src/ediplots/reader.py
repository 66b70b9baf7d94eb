"""CSV ingestion for the two figure inputs.

The package consumes only the benchmark's CSV interchange formats: the
long-format results table (experiment, alpha, seed, rep_index, metric,
component, value, elapsed_ms) and the agreement matrix (metric label column
followed by one column per label).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, NotSquare, SchemaMismatch

RESULTS_HEADER = [
    "experiment", "alpha", "seed", "rep_index", "metric", "component", "value",
    "elapsed_ms",
]


@dataclass(frozen=True)
class ResultRecord:
    experiment: str
    alpha: float
    label: str  # metric, or metric.component for multi-score metrics
    value: float


def read_results(path) -> list[ResultRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path}: empty file")
        if header != RESULTS_HEADER:
            raise SchemaMismatch(
                f"{path}: expected columns {RESULTS_HEADER}, got {header}")
        records = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(RESULTS_HEADER):
                raise SchemaMismatch(
                    f"{path}:{lineno}: expected {len(RESULTS_HEADER)} fields")
            experiment, alpha, _seed, _rep, metric, component, value, _ms = row
            label = metric if component == "Single" else f"{metric}.{component}"
            try:
                records.append(ResultRecord(experiment=experiment,
                                            alpha=float(alpha), label=label,
                                            value=float(value)))
            except ValueError as exc:
                raise SchemaMismatch(f"{path}:{lineno}: {exc}")
    if not records:
        raise EmptyInput(f"{path}: no result rows")
    return records


@dataclass(frozen=True)
class SweepSeries:
    label: str
    alphas: np.ndarray
    means: np.ndarray
    stds: np.ndarray


def sweep_series(records: list[ResultRecord]) -> list[SweepSeries]:
    """Per-label mean and std against alpha, pooled over seeds and reps."""
    groups: dict[tuple[str, float], list[float]] = {}
    for r in records:
        groups.setdefault((r.label, r.alpha), []).append(r.value)
    labels = sorted({label for label, _ in groups})
    series = []
    for label in labels:
        alphas = sorted(a for lbl, a in groups if lbl == label)
        values = [groups[(label, a)] for a in alphas]
        series.append(SweepSeries(
            label=label,
            alphas=np.asarray(alphas, dtype=float),
            means=np.asarray([np.mean(v) for v in values]),
            stds=np.asarray([np.std(v, ddof=1) if len(v) > 1 else 0.0
                             for v in values]),
        ))
    return series


def read_agreement(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaMismatch(f"{path}: empty file")
    header = rows[0]
    if not header or header[0] != "metric":
        raise SchemaMismatch(
            f"{path}: first column must be 'metric', got {header[:1]}")
    labels = header[1:]
    if not labels:
        raise EmptyInput(f"{path}: no metric columns")
    body = rows[1:]
    if len(body) != len(labels):
        raise NotSquare(
            f"{path}: {len(labels)} labels but {len(body)} matrix rows")
    matrix = np.zeros((len(labels), len(labels)))
    for i, row in enumerate(body):
        if len(row) != len(labels) + 1:
            raise NotSquare(f"{path}: row {i + 2} has {len(row) - 1} values, "
                            f"expected {len(labels)}")
        if row[0] != labels[i]:
            raise NotSquare(f"{path}: row label {row[0]!r} does not match "
                            f"column label {labels[i]!r}")
        try:
            matrix[i] = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise SchemaMismatch(f"{path}: row {i + 2}: {exc}")
    return labels, matrix
