"""SVG figures written next to the CSV/JSON reports.

Uses the non-interactive Agg backend with a fixed SVG hash salt and no date
stamp, so a figure rendered twice from the same data is byte-identical.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "svg.hashsalt": "distspec",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.figsize": (5.0, 3.4),
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def spectrum_histogram(path, atoms, bins, title: str = "", xlabel: str = "eigenvalue") -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.hist(np.asarray(atoms), bins=bins, color="0.35", edgecolor="white", linewidth=0.3)
        ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("pooled count")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def ecdf_vs_limit(path, samples, cdf, title: str = "") -> Path:
    """Step plot of the empirical CDF against a limit CDF, on a log x-axis."""
    x = np.sort(np.asarray(samples, dtype=float))
    x = x[x > 0]
    y = np.arange(1, x.size + 1) / x.size
    grid = np.geomspace(x[0], x[-1], 400)
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.step(x, y, where="post", color="k", linewidth=0.9, label="empirical")
        ax.plot(grid, cdf(grid), color="tab:red", linewidth=1.0, label="limit")
        ax.set_xscale("log")
        ax.set_ylim(0, 1)
        ax.set_xlabel("rescaled statistic")
        ax.set_ylabel("CDF")
        ax.legend(frameon=False)
        if title:
            ax.set_title(title)
        return _save(fig, path)


def eigenvalue_stems(path, series: dict, title: str = "") -> Path:
    """Stem plot of several eigenvalue sequences against rank."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        markers = iter(["o", "s", "^", "D"])
        for k, (label, vals) in enumerate(series.items()):
            vals = np.asarray(vals, dtype=float)
            ranks = np.arange(1, vals.size + 1) + 0.15 * k
            ml, sl, bl = ax.stem(ranks, vals, label=label, markerfmt=next(markers), basefmt=" ")
            plt.setp(sl, linewidth=0.7)
            plt.setp(ml, markersize=3.5, color=f"C{k}")
            plt.setp(sl, color=f"C{k}")
        ax.axhline(0, color="0.6", linewidth=0.5)
        ax.set_xlabel("rank (by |eigenvalue|)")
        ax.set_ylabel("eigenvalue")
        ax.legend(frameon=False)
        if title:
            ax.set_title(title)
        return _save(fig, path)


def growth_loglog(path, orders, medians, beta: float, title: str = "") -> Path:
    n = np.asarray(orders, dtype=float)
    m = np.asarray(medians, dtype=float)
    intercept = np.mean(np.log(m) - beta * np.log(n))
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.loglog(n, m, "o", color="k", markersize=4, label="median tr M^2")
        ax.loglog(n, np.exp(intercept) * n**beta, color="tab:blue", linewidth=1.0,
                  label=f"slope {beta:.3f}")
        ax.set_xlabel("order n")
        ax.set_ylabel("tr M^2")
        ax.legend(frameon=False)
        if title:
            ax.set_title(title)
        return _save(fig, path)
