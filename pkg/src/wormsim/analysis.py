"""Trajectory metrics: average velocity, path slope, turning radius.

average_velocity is the start-to-end secant over the requested window; for
periodic gaits the window should span an integer number of cycles taken
after the transient has died out.

fit_slope is a total-least-squares line through the head path (principal
direction of the centered samples), robust to near-vertical paths: the
direction angle is always reported, the slope comes back infinite when the
path is vertical.

fit_circle is the algebraic Kasa fit. For turning gaits the head also
wobbles within each cycle around its mean advance, so the cleanest radius
estimate fits the cycle-boundary samples only (the within-cycle oscillation
cancels exactly there in steady state); cycle_marks() extracts those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .simulate import Trajectory

__all__ = [
    "SlopeFit",
    "CircleFit",
    "Metrics",
    "average_velocity",
    "fit_slope",
    "fit_circle",
    "cycle_displacement",
    "cycle_marks",
    "compute_metrics",
]


def _window_indices(traj: Trajectory, window):
    t0, t1 = window
    return traj.index_at(t0), traj.index_at(t1)


def average_velocity(traj: Trajectory, window, min_window: float = 0.0):
    """Secant-average head velocity over [t0, t1]."""
    t0, t1 = window
    if not t1 > t0:
        raise ValueError(f"empty window [{t0}, {t1}]")
    if t1 - t0 < min_window:
        raise ValueError(
            f"window [{t0}, {t1}] shorter than required span {min_window}"
        )
    i0, i1 = _window_indices(traj, window)
    span = (i1 - i0) * traj.dt
    dx = traj.states[i1, 0] - traj.states[i0, 0]
    dy = traj.states[i1, 1] - traj.states[i0, 1]
    return dx / span, dy / span


@dataclass(frozen=True)
class SlopeFit:
    slope: float          # dy/dx of the fitted line, +-inf when vertical
    angle: float          # direction angle in (-pi/2, pi/2]
    rms: float            # perpendicular residual RMS [m]


def fit_slope(traj: Trajectory, window) -> SlopeFit:
    """Total-least-squares line through the head path samples in the window."""
    i0, i1 = _window_indices(traj, window)
    pts = traj.states[i0:i1 + 1, :2]
    if pts.shape[0] < 2:
        raise ValueError("need at least two samples to fit a line")
    centered = pts - pts.mean(axis=0)
    if not np.any(np.abs(centered) > 0.0):
        raise ValueError("degenerate path: zero spread")
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    dx, dy = vt[0]
    # fold the direction into (-pi/2, pi/2]
    if dx < 0.0 or (dx == 0.0 and dy < 0.0):
        dx, dy = -dx, -dy
    angle = math.atan2(dy, dx)
    slope = math.inf if dx == 0.0 else dy / dx
    resid = centered @ vt[1]
    return SlopeFit(slope=slope, angle=angle, rms=float(np.sqrt(np.mean(resid ** 2))))


@dataclass(frozen=True)
class CircleFit:
    center: tuple
    radius: float
    rms: float            # radial residual RMS [m]


def fit_circle(traj: Trajectory, window) -> CircleFit:
    """Algebraic least-squares circle through the head samples in the window."""
    i0, i1 = _window_indices(traj, window)
    pts = traj.states[i0:i1 + 1, :2]
    return fit_circle_points(pts[:, 0], pts[:, 1])


def fit_circle_points(x, y) -> CircleFit:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if len(x) < 3:
        raise ValueError("need at least three samples to fit a circle")
    A = np.column_stack([2.0 * x, 2.0 * y, np.ones_like(x)])
    b = x * x + y * y
    sol, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if rank < 3:
        raise ValueError("samples are collinear: circle radius undefined")
    cx, cy, c = sol
    r2 = c + cx * cx + cy * cy
    if not r2 > 0.0:
        raise ValueError("degenerate circle fit")
    radius = math.sqrt(r2)
    rms = float(np.sqrt(np.mean((np.hypot(x - cx, y - cy) - radius) ** 2)))
    return CircleFit(center=(float(cx), float(cy)), radius=radius, rms=rms)


def cycle_displacement(traj: Trajectory, period: float):
    """Head displacement magnitude per complete gait cycle."""
    if traj.duration < 2.0 * period - 1e-9:
        raise ValueError(
            f"need at least two complete cycles, have {traj.duration / period:.3f}"
        )
    cycles = int(math.floor(traj.duration / period + 1e-9))
    marks = np.array([traj.states[traj.index_at(k * period), :2]
                      for k in range(cycles + 1)])
    return np.hypot(*np.diff(marks, axis=0).T)


def cycle_marks(traj: Trajectory, period: float, first_cycle: int = 0,
                last_cycle: Optional[int] = None):
    """Head positions at cycle boundaries k*period, k = first..last."""
    if last_cycle is None:
        last_cycle = int(math.floor(traj.duration / period + 1e-9))
    idx = [traj.index_at(k * period) for k in range(first_cycle, last_cycle + 1)]
    return traj.states[idx, :2]


@dataclass(frozen=True)
class Metrics:
    avg_vx: float
    avg_vy: float
    speed: float
    slope: Optional[float]
    heading_angle: Optional[float]
    radius: Optional[float]
    rms: Optional[float]
    per_cycle: list

    def to_dict(self):
        def conv(v):
            if v is None:
                return None
            if isinstance(v, float) and math.isinf(v):
                return "inf" if v > 0 else "-inf"
            return float(v)

        return {
            "avg_vx": conv(self.avg_vx),
            "avg_vy": conv(self.avg_vy),
            "speed": conv(self.speed),
            "slope": conv(self.slope),
            "heading_angle": conv(self.heading_angle),
            "radius": conv(self.radius),
            "rms": conv(self.rms),
            "per_cycle": [float(v) for v in self.per_cycle],
        }


def compute_metrics(traj: Trajectory, period: float, transient_cycles: int = 2,
                    kind: Optional[str] = None) -> Metrics:
    """Standard metric set over the steady-state window of a periodic run.

    The window runs from transient_cycles*period to the last complete cycle
    boundary. For circular gaits the radius is fit to the cycle-boundary
    samples of that window; rms then reports the radial residual, otherwise
    the line-fit residual.
    """
    cycles = int(math.floor(traj.duration / period + 1e-9))
    if cycles <= transient_cycles:
        raise ValueError(
            f"run has {cycles} complete cycles, need more than "
            f"transient_cycles={transient_cycles}"
        )
    window = (transient_cycles * period, cycles * period)
    vx, vy = average_velocity(traj, window, min_window=period)
    per_cycle = cycle_displacement(traj, period) if cycles >= 2 else []
    slope = angle = rms = None
    try:
        line = fit_slope(traj, window)
        slope, angle, rms = line.slope, line.angle, line.rms
    except ValueError:
        pass
    radius = None
    if kind == "circular":
        marks = cycle_marks(traj, period, first_cycle=transient_cycles,
                            last_cycle=cycles)
        try:
            circ = fit_circle_points(marks[:, 0], marks[:, 1])
            radius, rms = circ.radius, circ.rms
        except ValueError:
            pass
    return Metrics(
        avg_vx=vx, avg_vy=vy, speed=math.hypot(vx, vy),
        slope=slope, heading_angle=angle, radius=radius, rms=rms,
        per_cycle=list(np.asarray(per_cycle, float)),
    )
