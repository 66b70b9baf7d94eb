"""Figure construction (matplotlib, non-interactive backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import EmptyInput, NotSquare
from .reader import SweepSeries


def render_sweep(series: list[SweepSeries], out_path, title: str = "") -> None:
    """Score curves against alpha with a +/- 1 std band per metric."""
    if not series:
        raise EmptyInput("no series to plot")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for s in series:
        (line,) = ax.plot(s.alphas, s.means, marker="o", markersize=3,
                          label=s.label)
        ax.fill_between(s.alphas, s.means - s.stds, s.means + s.stds,
                        color=line.get_color(), alpha=0.15, linewidth=0)
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel("score")
    ax.set_ylim(-0.05, 1.05)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8, ncols=2)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def render_agreement(labels: list[str], matrix, out_path,
                     title: str = "") -> None:
    """Heatmap of the pairwise rank-agreement matrix, fixed [-1, 1] scale."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NotSquare(f"matrix shape {matrix.shape} is not square")
    if len(labels) != matrix.shape[0]:
        raise NotSquare(f"{len(labels)} labels for a {matrix.shape} matrix")
    if not labels:
        raise EmptyInput("no metrics to plot")
    size = max(4.0, 0.6 * len(labels) + 2.0)
    fig, ax = plt.subplots(figsize=(size + 1.2, size))
    image = ax.imshow(matrix, vmin=-1.0, vmax=1.0, cmap="RdBu_r")
    ax.set_xticks(range(len(labels)), labels, rotation=45, ha="right",
                  fontsize=8)
    ax.set_yticks(range(len(labels)), labels, fontsize=8)
    for i in range(len(labels)):
        for j in range(len(labels)):
            ax.text(j, i, f"{matrix[i, j]:.2f}", ha="center", va="center",
                    fontsize=7)
    fig.colorbar(image, ax=ax, label="Spearman rank correlation")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
