"""Matplotlib figure renderers for the report CLI (file output, Agg backend)."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .dynamics import SimState
from .energy import RangePoint
from .longitudinal import EquilibriumPoint
from .wing import ThrustRow


def save_figure(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def thrust_grid_figure(rows: Sequence[ThrustRow], title: str = "Mean thrust"):
    """One line per amplitude across frequencies, like a stand sweep report."""
    by_amp = defaultdict(list)
    for r in rows:
        if r.amplitude_deg > 0:
            by_amp[r.amplitude_deg].append((r.frequency_hz, r.mean_thrust_gf))
    fig, ax = plt.subplots(figsize=(6, 4))
    for amp in sorted(by_amp):
        pts = sorted(by_amp[amp])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=f"{amp:g}$^\\circ$")
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("mean thrust [gf]")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(title="amplitude", fontsize=8)
    return fig


def pitch_curve_figure(points: Sequence[EquilibriumPoint], against_speed: bool):
    fig, ax = plt.subplots(figsize=(6, 4))
    ok = [p for p in points if p.converged]
    if against_speed:
        groups = defaultdict(list)
        for p in ok:
            groups[p.beta_deg].append(p)
        for beta in sorted(groups):
            pts = sorted(groups[beta], key=lambda p: p.v_mps)
            ax.plot([p.v_mps for p in pts], [p.theta_deg for p in pts],
                    label=f"$\\beta$={beta:g}$^\\circ$")
        ax.set_xlabel("forward speed [m/s]")
        ax.legend(fontsize=8)
    else:
        pts = sorted(ok, key=lambda p: p.beta_deg)
        ax.plot([p.beta_deg for p in pts], [p.theta_deg for p in pts])
        ax.set_xlabel("tail angle [deg]")
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_ylabel("equilibrium pitch [deg]")
    ax.set_title("Pitch equilibrium")
    ax.grid(True, alpha=0.3)
    return fig


def range_figure(points: Sequence[RangePoint]):
    fig, ax = plt.subplots(figsize=(6, 4))
    groups = defaultdict(list)
    for p in points:
        if p.in_range:
            groups[p.model.value].append(p)
    for model in sorted(groups):
        pts = sorted(groups[model], key=lambda p: p.speed_mps)
        ax.plot([p.speed_mps for p in pts], [p.range_m for p in pts],
                marker=".", label=model)
    ax.set_xlabel("speed [m/s]")
    ax.set_ylabel("range [m]")
    ax.set_title("Range vs. speed")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig


def trajectory_figure(states: Sequence[SimState]):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    xs = [s.x_m for s in states]
    ys = [s.y_m for s in states]
    ts = [s.t_s for s in states]
    ax1.plot(xs, ys, lw=1.0)
    ax1.plot(xs[0], ys[0], "go", label="start")
    ax1.plot(xs[-1], ys[-1], "rs", label="end")
    ax1.set_xlabel("x [m]")
    ax1.set_ylabel("y [m]")
    ax1.set_title("Top view")
    ax1.axis("equal")
    ax1.grid(True, alpha=0.3)
    ax1.legend(fontsize=8)
    ax2.plot(ts, [s.surge_mps for s in states], label="surge [m/s]")
    ax2.plot(ts, [s.z_m for s in states], label="altitude [m]")
    ax2.plot(ts, [s.pitch_deg for s in states], label="pitch [deg]")
    ax2.set_xlabel("t [s]")
    ax2.set_title("Time histories")
    ax2.grid(True, alpha=0.3)
    ax2.legend(fontsize=8)
    fig.tight_layout()
    return fig
