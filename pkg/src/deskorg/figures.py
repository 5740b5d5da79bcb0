"""Matplotlib figures for suite summaries and feasibility tables."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .feasibility import FeasibilityTables  # noqa: E402


def suite_figure(grouped: dict, path) -> None:
    """Bar panels for success rate by category count, ruler presence and ruler type."""
    fig, axes = plt.subplots(1, len(grouped), figsize=(4 * len(grouped), 3.2), sharey=True)
    for ax, (family, groups) in zip(axes, grouped.items()):
        names = list(groups)
        rates = [groups[n]["success_rate"] for n in names]
        ax.bar(names, rates, color="#4c72b0")
        for i, r in enumerate(rates):
            if not math.isnan(r):
                ax.text(i, r + 0.02, f"{r:.2f}", ha="center", fontsize=8)
        ax.set_title(family.replace("_", " "))
        ax.set_ylim(0, 1.1)
    axes[0].set_ylabel("success rate")
    fig.tight_layout()
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def pry_heatmap(tables: FeasibilityTables, path) -> None:
    ths = sorted({k[0] for k in tables.pry})
    alphas = sorted({k[1] for k in tables.pry})
    grid = [[tables.pry[(t, a)].value for a in alphas] for t in ths]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    im = ax.imshow(grid, vmin=0, vmax=1, cmap="viridis", aspect="auto")
    ax.set_xticks(range(len(alphas)), [f"{math.degrees(a):.0f}" for a in alphas])
    ax.set_yticks(range(len(ths)), [f"{t * 1e3:g}" for t in ths])
    ax.set_xlabel("prying angle (deg)")
    ax.set_ylabel("book thickness (mm)")
    for i, row in enumerate(grid):
        for j, v in enumerate(row):
            ax.text(j, i, f"{v:.2f}", ha="center", va="center", fontsize=7, color="w" if v < 0.5 else "k")
    fig.colorbar(im, ax=ax, label="success probability")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
