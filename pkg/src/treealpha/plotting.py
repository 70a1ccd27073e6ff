"""Figures for the bench harness (non-interactive Agg backend)."""
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (7.0, 4.2),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "legend.fontsize": 8,
}


def _label(row):
    return f"{row['method']} ({row['parameter']})"


def plot_ratios(rows, path):
    """Achieved ratio per run against the guaranteed ratio, one column per method/parameter."""
    groups = defaultdict(list)
    guaranteed = {}
    for row in rows:
        if row.get("ratio") in (None, ""):
            continue
        key = _label(row)
        groups[key].append(float(row["ratio"]))
        guaranteed[key] = float(Fraction(row["guaranteed"]))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        keys = sorted(groups)
        for x, key in enumerate(keys):
            ys = groups[key]
            ax.scatter([x] * len(ys), ys, s=10, alpha=0.5, color="tab:blue")
            ax.hlines(guaranteed[key], x - 0.35, x + 0.35, colors="tab:red", linewidth=2)
        ax.set_xticks(range(len(keys)))
        ax.set_xticklabels(keys, rotation=35, ha="right")
        ax.set_ylabel("achieved / optimum")
        ax.set_ylim(0, 1.05)
        ax.set_title("approximation ratios (red: guaranteed)")
        fig.tight_layout()
        fig.savefig(Path(path), dpi=130)
        plt.close(fig)


def plot_times(rows, path):
    """Mean wall time against n for each method/parameter."""
    acc = defaultdict(lambda: defaultdict(list))
    for row in rows:
        acc[_label(row)][int(row["n"])].append(float(row["time"]))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for key in sorted(acc):
            ns = sorted(acc[key])
            ax.plot(ns, [sum(acc[key][n]) / len(acc[key][n]) for n in ns], marker="o", markersize=3, label=key)
        ax.set_xlabel("n")
        ax.set_ylabel("seconds (mean)")
        ax.set_yscale("log")
        ax.set_title("running time")
        ax.legend(loc="upper left", ncol=2)
        fig.tight_layout()
        fig.savefig(Path(path), dpi=130)
        plt.close(fig)
