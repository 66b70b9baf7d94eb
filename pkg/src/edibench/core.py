"""Shared data model, validation and CSV/JSON serialization.

A Representation pairs a matrix of ground-truth factors (N x k) with a matrix
of latent codes (N x d).  Factors carry per-column kind metadata (discrete
with a category count, or continuous with a range).  Results travel as
long-format rows and round-trip through CSV at 12 significant digits.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainViolation,
    HeaderMismatch,
    MissingKinds,
    NonFinite,
    ParseError,
)

RESULTS_HEADER = [
    "experiment", "alpha", "seed", "rep_index", "metric", "component", "value", "elapsed_ms",
]

COMPONENTS = ("Modularity", "Compactness", "Explicitness", "Single")


@dataclass(frozen=True)
class FactorKind:
    """Domain of one factor column: discrete categories or a continuous range."""

    kind: str
    categories: int | None = None
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        if self.kind == "discrete":
            if self.categories is None or self.categories < 2:
                raise DomainViolation("discrete factor needs category_count >= 2")
        elif self.kind == "continuous":
            if self.lower is None or self.upper is None or not self.lower < self.upper:
                raise DomainViolation("continuous factor needs lower < upper")
        else:
            raise DomainViolation(f"unknown factor kind {self.kind!r}")

    @classmethod
    def discrete(cls, categories: int) -> "FactorKind":
        return cls(kind="discrete", categories=int(categories))

    @classmethod
    def continuous(cls, lower: float = 0.0, upper: float = 1.0) -> "FactorKind":
        return cls(kind="continuous", lower=float(lower), upper=float(upper))

    @property
    def is_discrete(self) -> bool:
        return self.kind == "discrete"

    def to_json_obj(self) -> dict:
        if self.is_discrete:
            return {"kind": "discrete", "categories": self.categories}
        return {"kind": "continuous", "lower": self.lower, "upper": self.upper}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FactorKind":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise MissingKinds(f"malformed kind entry: {obj!r}")
        if obj["kind"] == "discrete":
            return cls.discrete(obj["categories"])
        if obj["kind"] == "continuous":
            return cls.continuous(obj.get("lower", 0.0), obj.get("upper", 1.0))
        raise MissingKinds(f"unknown kind {obj['kind']!r}")


@dataclass(frozen=True)
class Representation:
    """Paired factor/code matrices plus factor-domain metadata."""

    factors: np.ndarray
    codes: np.ndarray
    factor_kinds: tuple[FactorKind, ...]
    seed: int = 0
    alpha: float | None = None

    def __post_init__(self):
        factors = np.asarray(self.factors, dtype=float)
        codes = np.asarray(self.codes, dtype=float)
        if factors.ndim == 1:
            factors = factors[:, None]
        if codes.ndim == 1:
            codes = codes[:, None]
        factors.flags.writeable = False
        codes.flags.writeable = False
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "factor_kinds", tuple(self.factor_kinds))

    @property
    def n(self) -> int:
        return self.factors.shape[0]

    @property
    def k(self) -> int:
        return self.factors.shape[1]

    @property
    def d(self) -> int:
        return self.codes.shape[1]


def validate_representation(rep: Representation) -> None:
    """Raise unless all Representation invariants hold."""
    if rep.factors.shape[0] != rep.codes.shape[0]:
        raise DimensionMismatch(
            f"factors have {rep.factors.shape[0]} rows, codes have {rep.codes.shape[0]}"
        )
    if rep.n < 2:
        raise DimensionMismatch(f"need at least 2 samples, got {rep.n}")
    if len(rep.factor_kinds) != rep.k:
        raise DimensionMismatch(
            f"{rep.k} factor columns but {len(rep.factor_kinds)} kind entries"
        )
    if not np.isfinite(rep.factors).all() or not np.isfinite(rep.codes).all():
        raise NonFinite("NaN or infinite entry in representation")
    for j, kind in enumerate(rep.factor_kinds):
        col = rep.factors[:, j]
        if kind.is_discrete:
            if not np.array_equal(col, np.round(col)):
                raise DomainViolation(f"discrete factor column {j} has non-integer entries")
            if col.min() < 0 or col.max() >= kind.categories:
                raise DomainViolation(
                    f"discrete factor column {j} outside [0, {kind.categories})"
                )
    if rep.alpha is not None and not 0.0 <= rep.alpha <= 1.0:
        raise DomainViolation(f"alpha {rep.alpha} outside [0, 1]")


@dataclass(frozen=True)
class MetricReport:
    """Named scores for one representation, keyed by (metric, component)."""

    entries: tuple[tuple[str, str, float], ...]

    def __post_init__(self):
        entries = tuple((str(m), str(c), float(v)) for m, c, v in self.entries)
        keys = [(m, c) for m, c, _ in entries]
        if len(set(keys)) != len(keys):
            raise DomainViolation("duplicate (metric, component) pair in report")
        for m, c, v in entries:
            if c not in COMPONENTS:
                raise DomainViolation(f"unknown component {c!r}")
            if not math.isfinite(v):
                raise NonFinite(f"non-finite value for {m}/{c}")
        object.__setattr__(self, "entries", entries)

    def value(self, metric: str, component: str = "Single") -> float:
        for m, c, v in self.entries:
            if m == metric and c == component:
                return v
        raise KeyError((metric, component))

    def as_dict(self) -> dict[tuple[str, str], float]:
        return {(m, c): v for m, c, v in self.entries}


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    alpha: float
    seed: int
    rep_index: int
    metric: str
    component: str
    value: float
    elapsed_ms: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainViolation(f"alpha {self.alpha} outside [0, 1]")
        if self.elapsed_ms < 0:
            raise DomainViolation("elapsed_ms must be nonnegative")


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def write_representation_csv(rep: Representation, path, kinds_path) -> None:
    """Dump a representation to the interchange CSV plus its kinds sidecar."""
    header = [f"z{j}" for j in range(rep.k)] + [f"c{i}" for i in range(rep.d)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for zs, cs in zip(rep.factors, rep.codes):
            writer.writerow([_fmt(v) for v in zs] + [_fmt(v) for v in cs])
    with open(kinds_path, "w") as fh:
        json.dump([k.to_json_obj() for k in rep.factor_kinds], fh, indent=2)
        fh.write("\n")


def _parse_rep_header(header: list[str]) -> tuple[int, int]:
    k = 0
    while k < len(header) and header[k] == f"z{k}":
        k += 1
    d = 0
    while k + d < len(header) and header[k + d] == f"c{d}":
        d += 1
    if k == 0 or d == 0 or k + d != len(header):
        raise HeaderMismatch(f"expected header z0..z{{k-1}},c0..c{{d-1}}, got {header}")
    return k, d


def read_representation_csv(path, kinds_path, seed: int = 0,
                            alpha: float | None = None) -> Representation:
    """Parse a representation CSV and its kinds sidecar, validating the result."""
    try:
        with open(kinds_path) as fh:
            kind_objs = json.load(fh)
    except FileNotFoundError:
        raise MissingKinds(f"kinds sidecar not found: {kinds_path}")
    except json.JSONDecodeError as exc:
        raise MissingKinds(f"kinds sidecar is not valid JSON: {exc}")
    if not isinstance(kind_objs, list):
        raise MissingKinds("kinds sidecar must be a JSON list")
    kinds = tuple(FactorKind.from_json_obj(o) for o in kind_objs)

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file")
        k, d = _parse_rep_header(header)
        if k != len(kinds):
            raise MissingKinds(f"{k} factor columns but {len(kinds)} kinds entries")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != k + d:
                raise ParseError(f"{path}:{lineno}: expected {k + d} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}")
    if not rows:
        raise ParseError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    rep = Representation(factors=data[:, :k], codes=data[:, k:],
                         factor_kinds=kinds, seed=seed, alpha=alpha)
    validate_representation(rep)
    return rep


def write_results_csv(rows, path) -> None:
    """Write long-format result rows; header is fixed by the results schema."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for r in rows:
            writer.writerow([
                r.experiment, _fmt(r.alpha), r.seed, r.rep_index,
                r.metric, r.component, _fmt(r.value), _fmt(r.elapsed_ms),
            ])


def read_results_csv(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file")
        if header != RESULTS_HEADER:
            raise HeaderMismatch(f"unexpected results header {header}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(RESULTS_HEADER):
                raise ParseError(f"{path}:{lineno}: expected {len(RESULTS_HEADER)} fields")
            try:
                out.append(ResultRow(
                    experiment=row[0], alpha=float(row[1]), seed=int(row[2]),
                    rep_index=int(row[3]), metric=row[4], component=row[5],
                    value=float(row[6]), elapsed_ms=float(row[7]),
                ))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}")
    return out
