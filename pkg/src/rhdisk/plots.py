"""Figure rendering for CLI reports.

Opt-in (the ``--plot`` flag): every figure is written as a PNG next to the
delimited output it mirrors.  Rendering never affects the data artifacts.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_residuals(report, path) -> None:
    """Residual norms against 1 - r on log-log axes."""
    fig, ax = plt.subplots(figsize=(6, 4))
    gaps = 1.0 - np.asarray(report.radii)
    floor = 1e-18  # keeps exactly-zero residuals plottable on the log axis
    ax.loglog(gaps, np.asarray(report.l1) + floor, "o-", label="L1 (mean abs)")
    ax.loglog(gaps, np.asarray(report.linf) + floor, "s-", label="Linf")
    ax.set_xlabel("1 - r")
    ax.set_ylabel("boundary residual")
    ax.invert_xaxis()
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_traces(theta, named_traces, path) -> None:
    """Overlay boundary traces (dict of label -> real array)."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, vals in named_traces.items():
        ax.plot(theta, vals, lw=1.0, label=label)
    ax.set_xlabel("theta")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_route_difference(theta, direct, gehring, path) -> None:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax1.plot(theta, direct, lw=1.0, label="direct")
    ax1.plot(theta, gehring, lw=0.8, ls="--", label="primitive route")
    ax1.legend(fontsize=8)
    ax1.grid(True, alpha=0.3)
    ax2.semilogy(theta, np.abs(np.asarray(direct) - np.asarray(gehring)) + 1e-18, lw=0.8)
    ax2.set_xlabel("theta")
    ax2.set_ylabel("|difference|")
    ax2.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_singular_values(sv, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(np.arange(1, len(sv) + 1), sv, "o-")
    ax.set_xlabel("index")
    ax.set_ylabel("singular value")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_measure_comparison(arcs, geometric, quadrature, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    idx = np.arange(len(arcs))
    width = 0.38
    ax.bar(idx - width / 2, geometric, width, label="geometric")
    ax.bar(idx + width / 2, quadrature, width, label="Poisson quadrature")
    ax.set_xticks(idx)
    ax.set_xticklabels([f"[{a:.3g},{b:.3g})" for a, b in arcs], fontsize=8)
    ax.set_ylabel("harmonic measure")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_correspondence(theta, param, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(theta, param, lw=1.0)
    ax.set_xlabel("disk angle")
    ax.set_ylabel("boundary parameter")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
