"""Entropy and mutual-information estimation backends.

Four backends are exposed behind one dispatch function:

* exact plug-in MI/entropy for discrete data,
* histogram (binned) plug-in MI for continuous data,
* the Kraskov k-nearest-neighbor estimator (algorithm 1, max-norm),
* a Donsker-Varadhan neural lower bound trained on half the data.

All estimates are in nats and nonnegative.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .dv import dv_lower_bound_mi
from .errors import (
    EmptyInput,
    IncompatibleEstimator,
    LengthMismatch,
    TooFewSamples,
)

DEFAULT_BINS = 20
KSG_JITTER_SCALE = 1e-10


@dataclass(frozen=True)
class DvConfig:
    """Hyperparameters for the neural DV-bound estimator."""

    hidden_layers: tuple[int, ...] = (100, 100)
    learning_rate: float = 1e-3
    batch_size: int = 512
    max_epochs: int = 150
    ema_rate: float = 0.01
    replicas: int = 3
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(int(h) for h in self.hidden_layers))
        if any(h <= 0 for h in self.hidden_layers):
            raise ValueError("hidden layer sizes must be positive")
        if self.learning_rate <= 0 or self.batch_size <= 0 or self.max_epochs <= 0:
            raise ValueError("learning_rate, batch_size, max_epochs must be positive")
        if self.replicas <= 0:
            raise ValueError("replicas must be positive")
        if not 0.0 < self.ema_rate < 1.0:
            raise ValueError("ema_rate must lie in (0, 1)")


@dataclass(frozen=True)
class EstimatorChoice:
    """Which MI backend to use: discrete | binned | ksg | dv."""

    kind: str = "ksg"
    bins: int = DEFAULT_BINS
    k_neighbors: int = 3
    dv: DvConfig = field(default_factory=DvConfig)

    def __post_init__(self):
        if self.kind not in ("discrete", "binned", "ksg", "dv"):
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "EstimatorChoice":
        """Parse CLI syntax: discrete | binned[:B] | ksg[:K] | dv."""
        name, _, arg = text.partition(":")
        if name == "discrete":
            return cls(kind="discrete")
        if name == "binned":
            return cls(kind="binned", bins=int(arg) if arg else DEFAULT_BINS)
        if name == "ksg":
            return cls(kind="ksg", k_neighbors=int(arg) if arg else 3)
        if name == "dv":
            return cls(kind="dv")
        raise ValueError(f"unknown estimator {text!r}")


def _as_2d(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    return a


def discrete_entropy(samples) -> float:
    """Plug-in entropy -sum p ln p of an integer sample, in nats."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise EmptyInput("discrete_entropy needs a nonempty sample")
    _, counts = np.unique(samples, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def _codes_1d(values: np.ndarray) -> np.ndarray:
    """Map arbitrary discrete values (rows for 2-d input) to dense integer codes."""
    if values.ndim == 2 and values.shape[1] > 1:
        _, codes = np.unique(values, axis=0, return_inverse=True)
    else:
        _, codes = np.unique(values.reshape(-1), return_inverse=True)
    return codes


def discrete_mi(x, y) -> float:
    """Exact plug-in MI between two discrete samples (columns or tuples)."""
    x = _as_2d(x)
    y = _as_2d(y)
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)} samples")
    if len(x) == 0:
        raise EmptyInput("discrete_mi needs nonempty samples")
    cx = _codes_1d(x)
    cy = _codes_1d(y)
    joint = np.zeros((cx.max() + 1, cy.max() + 1))
    np.add.at(joint, (cx, cy), 1.0)
    joint /= joint.sum()
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    mi = float((joint[nz] * np.log(joint[nz] / (px @ py)[nz])).sum())
    return max(mi, 0.0)


def _bin_edges(col: np.ndarray, bins: int, discrete: bool) -> np.ndarray:
    if discrete:
        vals = np.unique(col)
        edges = np.concatenate([vals - 0.5, [vals[-1] + 0.5]])
        return edges
    lo, hi = col.min(), col.max()
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, bins + 1)


def binned_mi(x, y, bins: int = DEFAULT_BINS, *,
              x_discrete: bool = False, y_discrete: bool = False) -> float:
    """Plug-in MI over a joint histogram with uniform-width bins per variable.

    Discrete variables use their observed categories as bins instead of the
    uniform grid.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)} samples")
    if len(x) < 2:
        raise EmptyInput("binned_mi needs at least 2 samples")
    ex = _bin_edges(x, bins, x_discrete)
    ey = _bin_edges(y, bins, y_discrete)
    ix = np.clip(np.digitize(x, ex[1:-1]), 0, len(ex) - 2)
    iy = np.clip(np.digitize(y, ey[1:-1]), 0, len(ey) - 2)
    return discrete_mi(ix, iy)


def quantize(col, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Quantize a continuous column into `bins` uniform-width bins (indices)."""
    col = np.asarray(col, dtype=float).reshape(-1)
    edges = _bin_edges(col, bins, discrete=False)
    return np.clip(np.digitize(col, edges[1:-1]), 0, bins - 1)


def _strict_window_counts_2d(a: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Per-point count of neighbors strictly within max-norm radius eps.

    Sorting by the first coordinate turns each query into "how many points
    in a contiguous position window have their second coordinate inside an
    interval", answered with a wavelet tree over second-coordinate ranks.
    Everything is vectorized over the queries, so the total cost is
    O(n log n) instead of the output-sensitive cost of ball queries.
    """
    n = len(a)
    order = np.argsort(a[:, 0], kind="mergesort")
    s1 = a[order, 0]
    lo = np.searchsorted(s1, a[:, 0] - eps, side="right")
    hi = np.searchsorted(s1, a[:, 0] + eps, side="left")

    # second coordinates as ranks, laid out in first-coordinate order
    s2 = np.sort(a[:, 1])
    vals = np.searchsorted(s2, a[order, 1])
    v_lo = np.searchsorted(s2, a[:, 1] - eps, side="right")
    v_hi = np.searchsorted(s2, a[:, 1] + eps, side="left")

    # thresholds from searchsorted range over [0, n] inclusive, so the tree
    # must encode one value past the largest rank (n == 2**k would otherwise
    # overflow the bit budget and wrap to 0)
    bits = max(1, int(n).bit_length())
    levels = []
    cur = vals
    for b in range(bits - 1, -1, -1):
        is_zero = ((cur >> b) & 1) == 0
        zeros_prefix = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(is_zero, out=zeros_prefix[1:])
        levels.append((zeros_prefix, int(zeros_prefix[-1])))
        cur = np.concatenate([cur[is_zero], cur[~is_zero]])

    def count_below(v):
        """#(positions in [lo, hi) whose value < v), vectorized over queries."""
        acc = np.zeros(n, dtype=np.int64)
        left, right = lo.astype(np.int64), hi.astype(np.int64)
        for depth, (zeros_prefix, zeros_total) in enumerate(levels):
            vbit = (v >> (bits - 1 - depth)) & 1
            zl = zeros_prefix[left]
            zr = zeros_prefix[right]
            go_right = vbit == 1
            acc[go_right] += (zr - zl)[go_right]
            left = np.where(go_right, zeros_total + (left - zl), zl)
            right = np.where(go_right, zeros_total + (right - zr), zr)
        return acc

    # subtract the point itself (distance 0 is always inside the box)
    return count_below(v_hi) - count_below(v_lo) - 1


def ksg_mi(x, y, k_neighbors: int = 3, seed: int = 0) -> float:
    """Kraskov-Stoegbauer-Grassberger MI estimator (algorithm 1, max-norm).

    Ties are broken by deterministic seeded jitter scaled to the data range.
    Negative estimates are clamped to 0.
    """
    x = _as_2d(x)
    y = _as_2d(y)
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)} samples")
    n = len(x)
    if n < k_neighbors + 1:
        raise TooFewSamples(f"need at least k+1={k_neighbors + 1} samples, got {n}")

    rng = np.random.default_rng(seed)
    def jitter(a):
        scale = np.where(a.max(axis=0) > a.min(axis=0), a.max(axis=0) - a.min(axis=0), 1.0)
        return a + rng.standard_normal(a.shape) * (KSG_JITTER_SCALE * scale)

    x = jitter(x)
    y = jitter(y)
    z = np.hstack([x, y])
    tree = cKDTree(z)
    # distance to the k-th neighbor in the joint space, excluding self
    dist, _ = tree.query(z, k=k_neighbors + 1, p=np.inf)
    eps = dist[:, -1]

    def marginal_counts(a):
        if a.shape[1] == 1:
            order = np.argsort(a[:, 0], kind="mergesort")
            s = a[order, 0]
            lo = np.searchsorted(s, a[:, 0] - eps, side="right")
            hi = np.searchsorted(s, a[:, 0] + eps, side="left")
            return hi - lo - 1  # excludes the point itself
        if a.shape[1] == 2:
            return _strict_window_counts_2d(a, eps)
        t = cKDTree(a)
        # strictly-within count; shrink the radius marginally to mimic "<"
        counts = t.query_ball_point(a, eps * (1 - 1e-12), p=np.inf, return_length=True)
        return np.asarray(counts) - 1

    nx = marginal_counts(x)
    ny = marginal_counts(y)
    mi = digamma(k_neighbors) + digamma(n) - float(
        np.mean(digamma(nx + 1) + digamma(ny + 1))
    )
    return max(float(mi), 0.0)


def ksg_mi_discrete_target(x, labels, k_neighbors: int = 3, seed: int = 0) -> float:
    """k-NN MI between continuous x and a discrete target (Ross's variant).

    Each point's radius is the distance (max-norm) to its k-th neighbor
    among points sharing its label; the estimate combines that with how
    many points of any label fall inside the radius.  Labels observed only
    once are excluded.  Negative estimates are clamped to 0.
    """
    x = _as_2d(x)
    labels = np.asarray(labels).reshape(-1)
    if len(x) != len(labels):
        raise LengthMismatch(f"{len(x)} vs {len(labels)} samples")
    n = len(x)
    if n < k_neighbors + 1:
        raise TooFewSamples(f"need at least k+1={k_neighbors + 1} samples, got {n}")

    rng = np.random.default_rng(seed)
    spread = np.where(x.max(axis=0) > x.min(axis=0), x.max(axis=0) - x.min(axis=0), 1.0)
    x = x + rng.standard_normal(x.shape) * (KSG_JITTER_SCALE * spread)

    radius = np.zeros(n)
    k_used = np.zeros(n)
    label_count = np.zeros(n)
    for label in np.unique(labels):
        mask = labels == label
        count = int(mask.sum())
        label_count[mask] = count
        if count < 2:
            continue
        k = min(k_neighbors, count - 1)
        k_used[mask] = k
        xc = x[mask]
        if x.shape[1] == 1:
            order = np.argsort(xc[:, 0])
            s = xc[order, 0]
            # k-th smallest gap among the k sorted neighbors on either side
            cand = np.full((count, 2 * k), np.inf)
            for j in range(1, k + 1):
                cand[j:, j - 1] = s[j:] - s[:-j]
                cand[:-j, k + j - 1] = s[j:] - s[:-j]
            kth = np.partition(cand, k - 1, axis=1)[:, k - 1]
            r = np.empty(count)
            r[order] = kth
        else:
            tree = cKDTree(xc)
            dist, _ = tree.query(xc, k=k + 1, p=np.inf)
            r = dist[:, -1]
        radius[mask] = r

    keep = label_count > 1
    x, radius, k_used, label_count = x[keep], radius[keep], k_used[keep], label_count[keep]
    m = int(keep.sum())
    if m < 2:
        raise TooFewSamples("all labels are singletons")

    # count of points of any label strictly inside each radius, self included
    if x.shape[1] == 1:
        s = np.sort(x[:, 0])
        inside = (np.searchsorted(s, x[:, 0] + radius, side="left")
                  - np.searchsorted(s, x[:, 0] - radius, side="right"))
    elif x.shape[1] == 2:
        inside = _strict_window_counts_2d(x, radius) + 1
    else:
        tree = cKDTree(x)
        inside = np.asarray(tree.query_ball_point(
            x, radius * (1 - 1e-12), p=np.inf, return_length=True))
    mi = (digamma(m) + float(np.mean(digamma(k_used)))
          - float(np.mean(digamma(label_count)))
          - float(np.mean(digamma(np.maximum(inside, 1)))))
    return max(float(mi), 0.0)


def neural_dv_mi(x, y, config: DvConfig | None = None) -> float:
    """Donsker-Varadhan lower-bound MI from a trained statistics network."""
    config = config or DvConfig()
    x = _as_2d(x)
    y = _as_2d(y)
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)} samples")
    if len(x) < 2 * config.batch_size:
        raise TooFewSamples(
            f"need at least 2*batch_size={2 * config.batch_size} samples, got {len(x)}"
        )
    return dv_lower_bound_mi(x, y, config)


def mutual_information(x, y, kinds: tuple[str, str],
                       choice: EstimatorChoice) -> float:
    """Dispatch MI estimation to the chosen backend.

    `kinds` marks each argument as "discrete" or "continuous"; the discrete
    plug-in backend requires both sides discrete with integer-valued entries.
    """
    x = _as_2d(x)
    y = _as_2d(y)
    if choice.kind == "discrete":
        for name, a, kind in (("x", x, kinds[0]), ("y", y, kinds[1])):
            if kind != "discrete":
                raise IncompatibleEstimator(f"DiscretePlugin requires discrete {name}")
            if not np.array_equal(a, np.round(a)):
                raise IncompatibleEstimator(f"{name} has non-integer entries")
        return discrete_mi(x, y)
    if choice.kind == "binned":
        if x.shape[1] != 1 or y.shape[1] != 1:
            raise IncompatibleEstimator("binned backend handles 1-d variables only")
        return binned_mi(x[:, 0], y[:, 0], choice.bins,
                         x_discrete=kinds[0] == "discrete",
                         y_discrete=kinds[1] == "discrete")
    if choice.kind == "ksg":
        # mixed continuous/discrete pairs use the discrete-target variant
        if kinds[0] == "discrete" and kinds[1] != "discrete":
            return ksg_mi_discrete_target(y, _codes_1d(x), choice.k_neighbors)
        if kinds[1] == "discrete" and kinds[0] != "discrete":
            return ksg_mi_discrete_target(x, _codes_1d(y), choice.k_neighbors)
        return ksg_mi(x, y, choice.k_neighbors)
    return neural_dv_mi(x, y, choice.dv)


def column_entropy(col, discrete: bool, bins: int = DEFAULT_BINS) -> float:
    """Plug-in entropy; continuous columns are quantized into uniform bins."""
    col = np.asarray(col, dtype=float).reshape(-1)
    if discrete:
        return discrete_entropy(col.astype(np.int64))
    return discrete_entropy(quantize(col, bins))
