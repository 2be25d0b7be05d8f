"""Static SVG figures: the chi(d) staircase with islands, and d(r) fits."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bounds import BoundsRecord, ExtrapolationFit, IslandRow  # noqa: E402


def chi_staircase(records: Sequence[BoundsRecord], islands: Sequence[IslandRow], path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for r in records:
        if r.d_lb is not None:
            ax.plot([r.d_lb], [r.chi], "v", color="tab:blue", ms=5)
        if r.d_ub is not None:
            ax.plot([r.d_ub], [r.chi + 1], "^", color="tab:red", ms=5)
        if r.d_ub_clique is not None:
            ax.plot([r.d_ub_clique], [r.chi], "x", color="tab:gray", ms=5)
    for row in islands:
        if row.status == "island":
            ax.hlines(row.chi, row.d_min, row.d_max, color="tab:green", lw=4)
        elif row.status == "empty" and row.d_min is not None:
            ax.hlines(row.chi, row.d_max, row.d_min, color="tab:orange", lw=1, linestyles=":")
    ax.set_xlabel("d")
    ax.set_ylabel("chi")
    ax.grid(alpha=0.3)
    ax.set_title("bounds on chi(d); green: exact range")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def fit_plot(fits: dict[str, ExtrapolationFit], path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for label, fit in fits.items():
        r = [p[0] for p in fit.points]
        d = [p[1] for p in fit.points]
        line = ax.plot(r, d, "o", ms=4, label=f"{label}: {fit.intercept:.3f} + {fit.slope:.2f} r")[0]
        xs = [0.0, max(r)]
        ax.plot(xs, [fit.predict(x) for x in xs], "-", color=line.get_color(), lw=1)
    ax.set_xlabel("r")
    ax.set_ylabel("d")
    ax.set_xlim(left=0)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
