"""File-only rendering of box tables and fitted estimates.

Uses the Agg backend so figures render in headless runs; every function
writes a PNG and returns the path it wrote.
"""

from __future__ import annotations

import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .dimension import KIND_CESARO, BoxRow, DimensionFit  # noqa: E402

_METHOD_STYLE = {
    "Exact": dict(color="tab:blue", marker="o"),
    "LowerBound": dict(color="tab:green", marker="^"),
    "UpperBound": dict(color="tab:red", marker="v"),
    "Greedy": dict(color="tab:orange", marker="s"),
}


def plot_box_table(rows: Sequence[BoxRow], path, title: str = "") -> str:
    """Covering-fraction decay: count/size against ell, log-scaled y,
    one series per counting method (at the largest n per ell)."""
    best: dict[tuple[str, int], BoxRow] = {}
    for row in rows:
        key = (row.method, row.ell)
        if key not in best or row.n > best[key].n:
            best[key] = row
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for method, style in _METHOD_STYLE.items():
        pts = sorted((ell, math.exp(r.log_ratio))
                     for (m, ell), r in best.items() if m == method)
        if pts:
            ax.semilogy([p[0] for p in pts], [p[1] for p in pts],
                        label=method, linestyle="--", **style)
    ax.set_xlabel("box size $\\ell$")
    ax.set_ylabel("covering fraction $N_B/|G_n|$")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_fit(fit: DimensionFit, path, title: str = "") -> str:
    """Fitted line over its points; for the Cesaro kind, the per-ell value
    sequence with the reported value marked."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if fit.kind == KIND_CESARO:
        xs = [x for x, _ in fit.points]
        ys = [y for _, y in fit.points]
        ax.plot(xs, ys, "o-", color="tab:blue", label="per-$\\ell$ mean value")
        ax.axhline(fit.slope, color="tab:red", linestyle=":",
                   label=f"value at largest $\\ell$ = {fit.slope:.4f}")
        ax.set_xlabel("box size $\\ell$")
        ax.set_ylabel("averaged decay rate")
    else:
        xs = [x for x, _ in fit.points]
        ys = [y for _, y in fit.points]
        ax.plot(xs, ys, "o", color="tab:blue", label="data")
        grid = [min(xs), max(xs)]
        ax.plot(grid, [fit.slope * x + fit.intercept for x in grid],
                color="tab:red",
                label=f"slope {fit.slope:.4f} (resid {fit.max_residual:.2e})")
        if fit.bracket is not None:
            lo, hi = fit.bracket
            ax.plot(grid, [lo * x + fit.intercept for x in grid],
                    color="tab:green", linestyle="--", label=f"bracket lo {lo:.4f}")
            ax.plot(grid, [hi * x + fit.intercept for x in grid],
                    color="tab:green", linestyle=":", label=f"bracket hi {hi:.4f}")
        ax.set_xlabel("$-\\log \\ell$" if fit.kind == "BoxDim" else "$-\\ell$")
        ax.set_ylabel("$\\log(N_B/|G_n|)$")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_lines(series: dict[str, tuple[Sequence[float], Sequence[float]]],
               path, xlabel: str = "", ylabel: str = "", title: str = "",
               logy: bool = False) -> str:
    """One labelled line per series entry {name: (xs, ys)}."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name, (xs, ys) in series.items():
        if logy:
            ax.semilogy(xs, ys, marker="o", label=name)
        else:
            ax.plot(xs, ys, marker="o", label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_histogram(values: Sequence[float], path, vline: float = None,
                   xlabel: str = "", title: str = "", bins: int = 25) -> str:
    """Histogram with an optional reference line."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(values, bins=bins, color="tab:blue", alpha=0.8)
    if vline is not None:
        ax.axvline(vline, color="tab:red", linestyle="--",
                   label=f"reference {vline:.4f}")
        ax.legend(fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("frequency")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_inner_sequence(values: Sequence[tuple[int, float]], ell: int, path,
                        title: str = "") -> str:
    """Fixed-ell inner sequence over n (oscillation diagnostics)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot([n for n, _ in values], [v for _, v in values],
            color="tab:blue", linewidth=0.8)
    ax.set_xlabel("$n$")
    ax.set_ylabel(f"decay rate at $\\ell={ell}$")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
