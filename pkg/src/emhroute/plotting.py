"""Figures for SH vs EMH runs, rendered to files.

matplotlib is imported lazily so the simulator itself never needs it.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .metrics import ComparisonSeries

RC = {
    "figure.figsize": (7.0, 3.6),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_bottleneck(c: ComparisonSeries, path, window: int = 15) -> Path:
    """Per-iteration bottleneck energy of both policies plus the EMH moving average."""
    plt = _pyplot()
    t = c.iterations
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.plot(t, c.e_b_sh * 1e3, color="tab:red", marker=".", ms=3, lw=0.8, label="SH")
        ax.plot(t, c.e_b_emh * 1e3, color="tab:blue", marker=".", ms=3, lw=0.8, label="EMH")
        ax.plot(t, c.e_b_emh_ma * 1e3, color="k", lw=2, label=f"EMH {window}-pt MA")
        ax.set_xlabel("iteration")
        ax.set_ylabel("bottleneck energy [mJ]")
        ax.set_xlim(1, t[-1])
        ax.legend(loc="upper right")
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return Path(path)


def plot_saving_ratio(c: ComparisonSeries, path) -> Path:
    """Saving ratio with SH-better spans shaded red and EMH-better spans blue."""
    plt = _pyplot()
    t = c.iterations
    rho = np.nan_to_num(c.rho)
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.plot(t, rho * 100, color="k")
        ax.fill_between(t, 0, rho * 100, where=rho < 0, color="tab:red", alpha=0.35, interpolate=True)
        ax.fill_between(t, 0, rho * 100, where=rho >= 0, color="tab:blue", alpha=0.35, interpolate=True)
        ax.axhline(0, color="grey", lw=0.8)
        ax.set_xlabel("iteration")
        ax.set_ylabel("saving ratio [%]")
        ax.set_xlim(1, t[-1])
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return Path(path)


def plot_saving_ratio_bundle(series: dict[int, ComparisonSeries], path) -> Path:
    """Every seed's saving ratio on one axis with the across-seed median."""
    plt = _pyplot()
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        rhos = []
        for seed, c in sorted(series.items()):
            ax.plot(c.iterations, c.rho * 100, color="tab:blue", alpha=0.25, lw=0.8)
            rhos.append(c.rho)
        T = min(len(r) for r in rhos)
        med = np.nanmedian(np.vstack([r[:T] for r in rhos]), axis=0)
        ax.plot(np.arange(1, T + 1), med * 100, color="k", lw=2, label="median")
        ax.axhline(0, color="grey", lw=0.8)
        ax.set_xlabel("iteration")
        ax.set_ylabel("saving ratio [%]")
        ax.legend(loc="lower right")
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return Path(path)
