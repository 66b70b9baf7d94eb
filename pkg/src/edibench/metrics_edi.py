"""The EDI metric: impact intensity, exclusivity, and the three scores.

Impact intensity normalizes each pairwise code/factor MI by the joint MI of
all codes with that factor, giving a d x k matrix of values in [0, 1] (small
estimator overshoot tolerated).  Exclusivity turns a row or column of that
matrix into "max minus RMS of the rest", from which modularity and
compactness follow; explicitness is the joint MI over the factor entropy.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .core import MetricReport, Representation
from .errors import EmptyInput, ZeroEntropyFactor
from .estimators import (
    DEFAULT_BINS,
    DvConfig,
    EstimatorChoice,
    discrete_entropy,
    discrete_mi,
    ksg_mi_discrete_target,
    mutual_information,
    neural_dv_mi,
    quantize,
)
from .seeding import mix64

UNCAPTURED_EPS = 1e-6
INTENSITY_CAP = 1.05


@dataclass(frozen=True)
class ImpactMatrix:
    """Impact intensities plus the per-factor joint MI and entropy."""

    intensities: np.ndarray  # d x k
    joint_mi: np.ndarray     # k
    factor_entropy: np.ndarray  # k
    uncaptured: np.ndarray   # k, bool
    code_scores: np.ndarray | None = None  # per-code exclusivity, diagnostics

    def to_json_obj(self) -> dict:
        return {
            "intensities": self.intensities.tolist(),
            "joint_mi": self.joint_mi.tolist(),
            "factor_entropy": self.factor_entropy.tolist(),
            "uncaptured": self.uncaptured.astype(bool).tolist(),
        }

    def dump_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh, indent=2)
            fh.write("\n")


def exclusivity(values) -> float:
    """Max attribute minus the RMS of the remaining attributes."""
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size == 0:
        raise EmptyInput("exclusivity needs a nonempty sequence")
    if values.size == 1:
        return float(values[0])
    i_star = int(np.argmax(values))
    rest = np.delete(values, i_star)
    return float(values[i_star] - np.sqrt((rest ** 2).sum() / (values.size - 1)))


def _all_discrete(rep: Representation) -> bool:
    if not all(k.is_discrete for k in rep.factor_kinds):
        return False
    return bool(np.array_equal(rep.codes, np.round(rep.codes)))


def _factor_target(rep: Representation, j: int, bins: int) -> np.ndarray:
    """Factor column as the MI target: raw categories, or quantized bins."""
    col = rep.factors[:, j]
    if rep.factor_kinds[j].is_discrete:
        return col.astype(np.int64)
    return quantize(col, bins)


def joint_mutual_information(rep: Representation, j: int,
                             choice: EstimatorChoice | None = None,
                             bins: int = DEFAULT_BINS) -> float:
    """I(c_1..c_d ; z_j) under the default backend policy.

    Exact plug-in on code tuples when everything is discrete, otherwise the
    neural DV bound for d > 3 and KSG for small d.  An explicit `choice`
    overrides the continuous-data policy.
    """
    target = _factor_target(rep, j, bins)
    if _all_discrete(rep):
        return discrete_mi(rep.codes, target)
    if choice is not None and choice.kind in ("ksg", "dv"):
        kind = choice.kind
    else:
        kind = "dv" if rep.d > 3 else "ksg"
    if kind == "dv":
        cfg = (choice.dv if choice is not None else DvConfig())
        cfg = replace(cfg, seed=mix64(rep.seed, "joint", j))
        return neural_dv_mi(rep.codes, target[:, None].astype(float), cfg)
    k_neighbors = choice.k_neighbors if choice is not None else 3
    return ksg_mi_discrete_target(rep.codes, target, k_neighbors,
                                  seed=mix64(rep.seed, "joint-ksg", j))


def impact_intensity(rep: Representation, choice: EstimatorChoice | None = None,
                     joint_choice: EstimatorChoice | None = None,
                     bins: int = DEFAULT_BINS) -> ImpactMatrix:
    """Impact matrix R(c_i; z_j) = I(c_i; z_j) / I(c_1..c_d; z_j).

    Factors whose joint MI falls below a small threshold are marked
    uncaptured and their intensity column set to 0.
    """
    d, k = rep.d, rep.k
    choice = choice or EstimatorChoice(kind="ksg")
    all_discrete = _all_discrete(rep)

    intensities = np.zeros((d, k))
    joint = np.zeros(k)
    entropy = np.zeros(k)
    uncaptured = np.zeros(k, dtype=bool)
    for j in range(k):
        target = _factor_target(rep, j, bins)
        entropy[j] = discrete_entropy(target)
        joint[j] = joint_mutual_information(rep, j, joint_choice or choice, bins)
        if joint[j] < UNCAPTURED_EPS:
            uncaptured[j] = True
            continue
        for i in range(d):
            code = rep.codes[:, i]
            if all_discrete:
                pair = discrete_mi(code, target)
            elif choice.kind == "ksg":
                pair = ksg_mi_discrete_target(code, target, choice.k_neighbors,
                                              seed=mix64(rep.seed, "pair-ksg", i, j))
            else:
                code_kind = "discrete" if np.array_equal(code, np.round(code)) else "continuous"
                pair = mutual_information(code, target.astype(float),
                                          (code_kind, "discrete"), choice)
            intensities[i, j] = min(pair / joint[j], INTENSITY_CAP)
    return ImpactMatrix(intensities=intensities, joint_mi=joint,
                        factor_entropy=entropy, uncaptured=uncaptured)


def edi_modularity(im: ImpactMatrix) -> float:
    """Per-code exclusivity, credited to each code's dominant factor and
    capped at 1 per factor."""
    d, k = im.intensities.shape
    scores = np.array([exclusivity(im.intensities[i]) for i in range(d)])
    s = np.zeros(k)
    for i in range(d):
        s[int(np.argmax(im.intensities[i]))] += scores[i]
    return float(np.clip(np.minimum(s, 1.0).sum() / k, 0.0, 1.0))


def edi_compactness(im: ImpactMatrix) -> float:
    k = im.intensities.shape[1]
    return float(np.clip(np.mean([exclusivity(im.intensities[:, j]) for j in range(k)]), 0.0, 1.0))


def edi_explicitness(im: ImpactMatrix) -> float:
    if np.any(im.factor_entropy <= 0):
        raise ZeroEntropyFactor("a factor has zero entropy")
    ratios = np.clip(im.joint_mi / im.factor_entropy, 0.0, 1.0)
    return float(ratios.mean())


def edi_report(rep: Representation, choice: EstimatorChoice | None = None,
               joint_choice: EstimatorChoice | None = None) -> MetricReport:
    im = impact_intensity(rep, choice, joint_choice)
    return MetricReport(entries=(
        ("edi", "Modularity", edi_modularity(im)),
        ("edi", "Compactness", edi_compactness(im)),
        ("edi", "Explicitness", edi_explicitness(im)),
    ))
