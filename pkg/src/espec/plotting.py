"""Matplotlib figures written next to the tabular output.

matplotlib is imported lazily so the numerical library does not depend on
it; the Agg backend is forced since figures only ever go to files.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

FIG_WIDTH = 4.5
GOLDEN = (np.sqrt(5) - 1) / 2

_TAG_COLORS = {
    "NonDegenerate": "0.85",
    "Sixteenfold": "0.55",
    "FourfoldDiagonal": "0.35",
    "FourfoldAntidiagonal": "0.15",
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({
        "font.size": 10,
        "axes.labelsize": 11,
        "xtick.direction": "in",
        "ytick.direction": "in",
        "savefig.dpi": 150,
    })
    return plt


def plot_spectrum(spec, groups, path, title=None, xi_max=None):
    """Levels as short bars over the subsystem particle number, with the
    multiplicity of the ground group written above each column it occupies."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(FIG_WIDTH, FIG_WIDTH * GOLDEN * 1.3))
    n = spec.n_up + spec.n_down
    keep = np.ones(len(spec), bool) if xi_max is None else spec.xi <= xi_max
    ax.hlines(spec.xi[keep], n[keep] - 0.3, n[keep] + 0.3, colors="k", lw=1.0)
    if groups:
        counts: dict[int, int] = {}
        for m in groups[0].members:
            counts[m.n_up + m.n_down] = counts.get(m.n_up + m.n_down, 0) + 1
        top = groups[0].xi_rep
        span = (spec.xi[keep].max() - spec.xi[keep].min()) if keep.any() else 1.0
        for col, c in sorted(counts.items()):
            ax.text(col, top - 0.04 * max(span, 1.0), str(c), ha="center", va="bottom", color="C3")
    ax.set_xlabel("particle number in subsystem")
    ax.set_ylabel(r"$\xi$")
    ax.invert_yaxis()
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def plot_phase_diagram(grid, cells, path):
    plt = _pyplot()
    from matplotlib.patches import Patch

    fig, ax = plt.subplots(figsize=(FIG_WIDTH, FIG_WIDTH * GOLDEN * 1.2))
    dts, us = grid.delta_t_values, grid.U_values
    lookup = {(c.delta_t, c.U): c for c in cells}
    for i, dt in enumerate(dts):
        for j, u in enumerate(us):
            c = lookup[(dt, u)]
            color = _TAG_COLORS.get(c.signature, "white")
            ax.add_patch(plt.Rectangle((i - 0.5, j - 0.5), 1, 1, facecolor=color, edgecolor="k", lw=0.5))
            text = "err" if c.error else str(c.ground_multiplicity)
            ax.text(i, j, text, ha="center", va="center", color="C3", fontsize=8)
    ax.set_xlim(-0.5, len(dts) - 0.5)
    ax.set_ylim(-0.5, len(us) - 0.5)
    ax.set_xticks(range(len(dts)), [f"{x:g}" for x in dts])
    ax.set_yticks(range(len(us)), [f"{x:g}" for x in us])
    ax.set_xlabel(r"$\delta t$")
    ax.set_ylabel(r"$U$")
    handles = [Patch(facecolor=v, edgecolor="k", label=k) for k, v in _TAG_COLORS.items()]
    ax.legend(handles=handles, fontsize=6, loc="upper left", bbox_to_anchor=(1.02, 1.0), frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)
