"""Figure rendering for the report command (Agg backend, PNG files)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .config import RunConfig  # noqa: E402
from .gait import build_gait  # noqa: E402
from .simulate import Trajectory  # noqa: E402

__all__ = ["render_report"]


def render_report(cfg: RunConfig, traj: Trajectory, out_dir: str):
    """Render path, displacement-history, and actuation figures.

    Returns the list of written file paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []

    t = traj.times
    x, y, th = traj.states[:, 0], traj.states[:, 1], traj.states[:, 2]

    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.plot(x, y, lw=0.8)
    ax.plot(x[0], y[0], "o", ms=4, label="start")
    ax.plot(x[-1], y[-1], "s", ms=4, label="end")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(f"head path ({traj.mode} mode, {cfg.gait.kind} gait)")
    ax.axis("equal")
    ax.legend(loc="best", fontsize=8)
    path = os.path.join(out_dir, "head_path.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, axes = plt.subplots(3, 1, figsize=(6.0, 6.0), sharex=True)
    for ax, series, label in zip(axes, (x, y, th),
                                 ("x1 [m]", "y1 [m]", "theta1 [rad]")):
        ax.plot(t, series, lw=0.8)
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
    axes[-1].set_xlabel("t [s]")
    axes[0].set_title("head displacement histories")
    path = os.path.join(out_dir, "displacement.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    gait = build_gait(cfg.gait, cfg.robot)
    T = cfg.gait.period
    ts = np.linspace(0.0, T, 601)
    samples = [gait.sample(tt) for tt in ts]
    n = cfg.robot.n
    fig, axes = plt.subplots(n, 1, figsize=(6.0, 1.1 * n + 1.0),
                             sharex=True, squeeze=False)
    for i in range(n):
        ax = axes[i, 0]
        ax.plot(ts, [s.l_l[i] for s in samples], lw=0.9, label="left")
        ax.plot(ts, [s.l_r[i] for s in samples], lw=0.9, ls="--", label="right")
        ax.set_ylabel(f"seg {i + 1}", fontsize=8)
        ax.tick_params(labelsize=7)
    axes[0, 0].legend(loc="upper right", fontsize=7, ncol=2)
    axes[0, 0].set_title("actuation signals over one period")
    axes[-1, 0].set_xlabel("t [s]")
    path = os.path.join(out_dir, "actuation.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)
    return written
