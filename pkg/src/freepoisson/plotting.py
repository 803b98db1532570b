"""Figure rendering for CLI reports.

Every function writes a PNG next to the delimited report it illustrates
and returns the path.  All figures are rendered with the Agg backend and
fixed layout parameters so repeated runs produce identical files.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 110


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_convergence_figure(rows, path):
    """Log-log error vs N for each cumulant order in a convergence table."""
    fig, ax = plt.subplots(figsize=(6, 4))
    orders = sorted({n for _, n, _, _ in rows})
    for n in orders:
        pts = [(N, float(err)) for N, m, _, err in rows if m == n and float(err) > 0]
        if pts:
            ax.loglog(*zip(*pts), marker="o", label=f"n = {n}")
    ax.set_xlabel("row size N")
    ax.set_ylabel("|kappa_n(S_N) - lambda alpha^n|")
    ax.set_title("Triangular-array cumulant convergence")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    return _finish(fig, path)


def save_mercer_figure(rows, path):
    """Mercer truncation sup-error against the truncation rank."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog([N for N, _ in rows], [e for _, e in rows], marker="o")
    ax.set_xlabel("truncation rank N")
    ax.set_ylabel("sup |kernel - partial sum|")
    ax.set_title("Mercer truncation error")
    return _finish(fig, path)


def save_eigensystem_figure(sys, path):
    """Eigenvalue decay plus the first few eigenfunctions."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ns = np.arange(1, sys.count + 1)
    ax1.semilogy(ns, sys.eigenvalues, marker="o", linestyle="none")
    ax1.set_xlabel("n")
    ax1.set_ylabel("lambda_n")
    ax1.set_title("Eigenvalue decay")
    t = np.linspace(0.0, sys.T, 400)
    for n in range(1, min(3, sys.count) + 1):
        ax2.plot(t, sys.phi(n, t), label=f"phi_{n}")
    ax2.set_xlabel("t")
    ax2.set_title("Leading eigenfunctions")
    ax2.legend()
    return _finish(fig, path)


def _plot_step(ax, s, **kwargs):
    for iv, c in s.pieces:
        ax.hlines(float(c), float(iv.lo), float(iv.hi), **kwargs)
        kwargs.pop("label", None)


def save_integrand_figure(f, s, path):
    """Piecewise-polynomial integrand with its step approximation."""
    fig, ax = plt.subplots(figsize=(6, 4))
    bounds = f.support_bounds()
    if bounds is not None:
        lo, hi = (float(x) for x in bounds)
        pad = 0.05 * (hi - lo)
        xs = np.linspace(lo - pad, hi + pad, 600)
        ax.plot(xs, [float(f(float(x))) for x in xs], label="f")
    if s is not None and s.pieces:
        _plot_step(ax, s, colors="C1", label="step approximation")
    ax.set_xlabel("x")
    ax.set_title("Integrand")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    return _finish(fig, path)


def save_step_figure(s, path):
    """A step function on its own."""
    fig, ax = plt.subplots(figsize=(6, 4))
    _plot_step(ax, s, colors="C0")
    ax.axhline(0.0, color="grey", linewidth=0.6)
    ax.set_xlabel("x")
    ax.set_title("Step function")
    return _finish(fig, path)


def save_simulation_figure(report, path):
    """Predicted vs empirical moments of a simulated step integral."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ks = np.arange(1, len(report["predicted"]) + 1)
    width = 0.38
    ax.bar(ks - width / 2, report["predicted"], width, label="predicted")
    ax.bar(ks + width / 2, report["empirical"], width, label="empirical")
    ax.set_xticks(ks)
    ax.set_xlabel("moment order")
    ax.set_title(f"Step-integral moments (d = {report['d']})")
    ax.legend()
    return _finish(fig, path)
