"""Render calibration and evaluation figures to files.

All figures go through the Agg backend so report generation works headless
and produces deterministic bytes for a fixed input.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .calibration import CalibrationResult, lee_liu  # noqa: E402

_SAVE_KW = {"dpi": 120, "metadata": {"Software": "cohortminer"}}


def plot_recall_curve(result: CalibrationResult, path: Union[str, Path]) -> None:
    """Held-out recall vs group size: grid points, Pareto frontier, and the
    elbow / Lee-Liu suggestions."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(
        [p.group_size for p in result.points],
        [float(p.recall_bar) for p in result.points],
        s=12, color="#bbbbbb", label="grid points", zorder=1,
    )
    ax.plot(
        [p.group_size for p in result.frontier],
        [float(p.recall_bar) for p in result.frontier],
        "o-", color="#1f77b4", label="Pareto frontier", zorder=2,
    )
    chosen = result.chosen
    ax.scatter(
        [chosen.group_size], [float(chosen.recall_bar)],
        s=90, color="red", marker="o", label=f"chosen ({result.method})", zorder=3,
    )
    try:
        alt = lee_liu(result.frontier)
        if (alt.alpha_f, alt.alpha_d) != (chosen.alpha_f, chosen.alpha_d):
            ax.scatter(
                [alt.group_size], [float(alt.recall_bar)],
                s=70, color="darkorange", marker="D", label="lee_liu", zorder=3,
            )
    except Exception:
        pass
    ax.set_xlabel("selected group size")
    ax.set_ylabel("estimated recall (held-out sample)")
    title = "Recall vs group size"
    if result.degenerate:
        title += " (degenerate curve)"
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_recall_validation(
    estimated: Sequence[float], true: Sequence[float], path: Union[str, Path],
    rho: float | None = None,
) -> None:
    """Held-out recall estimate vs true recall across the cut-off grid."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.scatter(estimated, true, s=20, color="#1f77b4")
    ax.plot([0, 1], [0, 1], "--", color="#999999", linewidth=1)
    ax.set_xlabel("estimated recall")
    ax.set_ylabel("true recall")
    title = "Recall estimate validity"
    if rho is not None:
        title += f" (Spearman rho={rho:.2f})"
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_f1_by_period(rows: Sequence[dict], path: Union[str, Path]) -> None:
    """Grouped bar chart of F-measure per (group, period)."""
    groups = sorted({r["group"] for r in rows})
    periods = sorted({r["period"] for r in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / max(len(groups), 1)
    for gi, group in enumerate(groups):
        xs = [pi + gi * width for pi in range(len(periods))]
        ys = [
            next((r["f_measure"] for r in rows if r["group"] == group and r["period"] == p), 0.0)
            for p in periods
        ]
        ax.bar(xs, ys, width=width, label=group)
    ax.set_xticks([pi + 0.4 - width / 2 for pi in range(len(periods))])
    ax.set_xticklabels(periods)
    ax.set_ylabel("F-measure")
    ax.set_title("Best F-measure per period")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
