"""Delimited reports and figures.

CSV numerics carry 17 significant digits so values round-trip exactly across
implementations; JSON reports embed the resolved configuration. Figures are
rendered headless to PNG next to the delimited files when plotting is
requested.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .classical import Trajectory  # noqa: E402
from .evolution import EvolutionSeries  # noqa: E402
from .spectral import Spectrum  # noqa: E402

__all__ = [
    "fmt",
    "write_json",
    "write_spectrum_csv",
    "write_trajectory_csv",
    "write_timeseries_csv",
    "render_spectrum_figure",
    "render_comparison_figure",
    "render_trajectory_figure",
    "render_timeseries_figure",
]


def fmt(x: float) -> str:
    """17 significant digits: enough for exact float64 round trips."""
    return f"{float(x):.17g}"


def write_json(path, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_spectrum_csv(path, spectrum: Spectrum) -> None:
    lines = ["index,energy,residual"]
    for i, (e, r) in enumerate(zip(spectrum.eigenvalues, spectrum.residuals)):
        lines.append(f"{i},{fmt(e)},{fmt(r)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_trajectory_csv(path, traj: Trajectory) -> None:
    lines = ["t,x,y,px,py,pix,piy,energy"]
    for t, s, pm, en in zip(traj.times, traj.states, traj.pseudo_momenta, traj.energies):
        cells = [fmt(t), fmt(s[0]), fmt(s[1]), fmt(s[2]), fmt(s[3]), fmt(pm[0]), fmt(pm[1]), fmt(en)]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_timeseries_csv(path, series: EvolutionSeries) -> None:
    lines = ["t,mean_x,mean_p,mean_pi,norm,energy"]
    for i in range(len(series.times)):
        cells = [
            fmt(series.times[i]),
            fmt(series.mean_x[i]),
            fmt(series.mean_p[i]),
            fmt(series.mean_pi[i]),
            fmt(series.norms[i]),
            fmt(series.energies[i]),
        ]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _save(fig, path) -> None:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_spectrum_figure(path, spectrum: Spectrum, title: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.4))
    idx = np.arange(len(spectrum.eigenvalues))
    ax.plot(idx, spectrum.eigenvalues, "o-", ms=4)
    ax.set_xlabel("level")
    ax.set_ylabel("energy")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    _save(fig, path)


def render_comparison_figure(path, report_dict: dict, title: str) -> None:
    levels = report_dict["levels"]
    idx = [l["level"] for l in levels]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.4))
    ax1.plot(idx, [l["e1"] for l in levels], "o-", ms=4, label="first")
    ax1.plot(idx, [l["e2"] for l in levels], "s--", ms=4, label="second")
    ax1.set_xlabel("level")
    ax1.set_ylabel("energy")
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)
    ax2.bar(idx, [l["abs_diff"] for l in levels], color="tab:red", alpha=0.7)
    thresholds = report_dict.get("thresholds")
    if thresholds:
        ax2.plot(idx, thresholds, "k_", ms=14, label="5x refinement error")
        ax2.legend(fontsize=8)
    ax2.set_xlabel("level")
    ax2.set_ylabel("|energy difference|")
    ax2.set_yscale("log")
    ax2.grid(alpha=0.3)
    fig.suptitle(title)
    _save(fig, path)


def render_trajectory_figure(path, traj: Trajectory, title: str) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.4))
    ax1.plot(traj.states[:, 0], traj.states[:, 1], lw=0.8)
    ax1.plot(traj.states[0, 0], traj.states[0, 1], "go", ms=5)
    ax1.set_xlabel("x")
    ax1.set_ylabel("y")
    ax1.set_aspect("equal", adjustable="datalim")
    ax1.grid(alpha=0.3)
    e0 = traj.energies[0]
    scale = abs(e0) if abs(e0) > 0 else 1.0
    ax2.plot(traj.times, (traj.energies - e0) / scale, label="energy drift")
    pi2 = traj.pseudo_momenta[:, 0] ** 2 + traj.pseudo_momenta[:, 1] ** 2
    ax2.plot(traj.times, pi2 - pi2[0], "--", label="|Pi|^2 drift")
    ax2.set_xlabel("t")
    ax2.legend(fontsize=8)
    ax2.grid(alpha=0.3)
    fig.suptitle(title)
    _save(fig, path)


def render_timeseries_figure(path, series: EvolutionSeries, title: str) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.4))
    ax1.plot(series.times, series.mean_x, label="<x>")
    ax1.set_xlabel("t")
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)
    ax2.plot(series.times, series.mean_p, label="<p>")
    ax2.plot(series.times, series.mean_pi, "--", label="<Pi>")
    ax2.set_xlabel("t")
    ax2.legend(fontsize=8)
    ax2.grid(alpha=0.3)
    fig.suptitle(title)
    _save(fig, path)
