"""Log-log figure of benchmark records."""

from __future__ import annotations

import math

import numpy as np


def fit_slope(ns, values) -> float:
    """Least-squares slope of log(values) against log(ns)."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.maximum(np.asarray(values, dtype=float), 1e-300))
    if len(np.unique(x)) < 2:
        return math.nan
    return float(np.polyfit(x, y, 1)[0])


def plot_bench(records: list[dict], path, metric: str = "ops") -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    for solver in sorted({r["solver"] for r in records}):
        rows = [r for r in records if r["solver"] == solver]
        ns = sorted({r["n"] for r in rows})
        ys = [np.median([r[metric] for r in rows if r["n"] == n]) for n in ns]
        slope = fit_slope(ns, ys)
        ax.loglog(ns, ys, "o-", label=f"{solver} (slope {slope:.2f})")
    ax.set_xlabel("n = m")
    ax.set_ylabel("operations" if metric == "ops" else metric)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
