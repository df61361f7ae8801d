"""Figures for trajectories and verification reports (Agg backend, file output only)."""

from __future__ import annotations

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_drift(traj, path, title: str | None = None) -> None:
    """Relative drift |F(t) - F(0)| / max|F| of every monitored observable."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    floor = np.finfo(float).eps
    for name, vals in traj.monitors.items():
        ref = max(float(np.max(np.abs(vals))), 1e-300)
        ax.semilogy(traj.times, np.maximum(np.abs(vals - vals[0]) / ref, floor), label=name, lw=1)
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    if title:
        ax.set_title(title)
    if traj.monitors:
        ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_report(report, path) -> None:
    """Each check's residual as a multiple of its tolerance, on a log axis."""
    plt = _pyplot()
    checks = report.checks
    ratios = [max(c.max_residual, 1e-300) / c.tolerance if c.tolerance > 0 else 0.0
              for c in checks]
    ratios = np.maximum(np.array(ratios, dtype=float), 1e-20)
    fig, ax = plt.subplots(figsize=(7, max(3.0, 0.22 * len(checks) + 1)))
    colors = ["tab:green" if c.passed else "tab:red" for c in checks]
    y = np.arange(len(checks))
    ax.barh(y, np.log10(ratios), color=colors)
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_yticks(y)
    ax.set_yticklabels([c.name for c in checks], fontsize=6)
    ax.invert_yaxis()
    ax.set_xlabel("log10(residual / tolerance)")
    ax.set_title(report.system.label)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


__all__ = ["plot_drift", "plot_report"]
