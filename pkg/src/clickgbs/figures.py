"""Figure rendering for the CLI report paths.

Figures are written straight to files next to the delimited output; no
interactive backends.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_tvd_curve(rows, path, n_detectors: int) -> None:
    """Line plot of the click-vs-PNR TVD over the thermal sweep."""
    nbars = [r[0] for r in rows]
    tvds = [r[1] for r in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(nbars, tvds, marker="o", markersize=3, lw=1.2)
    ax.axhline(0.05, color="gray", lw=0.8, ls="--")
    ax.set_xlabel(r"mean photon number $\bar{n}$")
    ax.set_ylabel("TVD(click, PNR)")
    ax.set_title(f"Click counting vs photon-number resolution (N = {n_detectors})")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_distribution(dist, path) -> None:
    """Bar chart of a full click distribution in lexicographic pattern order."""
    patterns = sorted(dist.probs)
    probs = [dist.probs[p] for p in patterns]
    labels = [",".join(str(x) for x in p) for p in patterns]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.28 * len(patterns)), 3.2))
    ax.bar(range(len(patterns)), probs, width=0.8)
    step = max(1, len(patterns) // 40)
    ax.set_xticks(range(0, len(patterns), step))
    ax.set_xticklabels(labels[::step], rotation=90, fontsize=6)
    ax.set_xlabel("click pattern")
    ax.set_ylabel("probability")
    ax.set_title(f"Click distribution (M = {dist.modes}, N = {dist.n_detectors})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
