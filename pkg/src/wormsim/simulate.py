"""Fixed-step time integration and the anchor-based kinematic baseline.

Classical RK4 with a fixed step keeps runs deterministic: identical inputs
produce bit-identical trajectories, and convergence studies are a matter of
halving dt. Sample times are computed as i*dt (never accumulated) so the
time grid has no drift.

The kinematic baseline is the no-slip idealization: at every step one plate
(the anchor) is frozen at its previous pose and the rest of the chain is
placed from it through the shape chain. The default anchor rule follows the
bristle-grip intuition (rear plate of the most contracted segment) and can
be overridden by an explicit schedule. Anchor hand-offs are continuous by
construction because the newly anchored plate is frozen at the pose it
already had.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import MODES, HeadState, make_derivative, reconstruct_bodies
from .errors import SimulationError, WormsimError
from .geometry import _cum0, segment_shape
from .model import RobotParams, validate_params

__all__ = ["Trajectory", "rk4_step", "simulate", "kinematic_predict", "DT_GUARD_FACTOR"]

# resolution guard: at least this many steps per gait period
DT_GUARD_FACTOR = 200


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled run output.

    states holds one row [x1, y1, theta1, vx1, vy1, omega1] per sample at
    times t0 + i*dt. bodies, when recorded, holds (x, y, theta) per plate.
    """

    dt: float
    states: np.ndarray
    mode: str
    t0: float = 0.0
    bodies: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.states.shape[0])

    @property
    def duration(self):
        return self.dt * (self.states.shape[0] - 1)

    def head_state(self, i) -> HeadState:
        return HeadState.from_array(self.states[i], t=self.t0 + i * self.dt)

    def index_at(self, t) -> int:
        i = int(round((t - self.t0) / self.dt))
        if not (0 <= i < self.states.shape[0]):
            raise ValueError(f"time {t} outside trajectory")
        return i


def params_hash(params: RobotParams) -> str:
    """Short stable digest of the physical parameters, for run metadata."""
    fr = params.friction
    key = (params.n, params.r, params.m, params.J, params.g,
           fr.xi_forward, fr.xi_backward, fr.xi_normal, fr.smoothing_eps)
    return hashlib.sha256(repr(key).encode()).hexdigest()[:12]


def rk4_step(y, t, dt, derivative):
    """One classical 4th-order Runge-Kutta step of dy/dt = derivative(t, y)."""
    k1 = derivative(t, y)
    k2 = derivative(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = derivative(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = derivative(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_steps(duration, dt, period):
    if not duration > 0.0:
        raise ValueError(f"duration must be positive, got {duration!r}")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if dt > period / DT_GUARD_FACTOR * (1.0 + 1e-12):
        raise ValueError(
            f"dt={dt!r} too coarse: need at least {DT_GUARD_FACTOR} steps "
            f"per gait period {period!r}"
        )
    return int(round(duration / dt))


def simulate(params: RobotParams, actuation, mode: str, duration: float, dt: float,
             initial: Optional[HeadState] = None, full_bodies: bool = False) -> Trajectory:
    """Integrate the reduced dynamics over [0, duration].

    mode selects the closure ("paper" or "projection"). The default initial
    state is the head at the origin, heading +x, at rest, with the gait
    sampled from t = 0.
    """
    if mode not in MODES:
        raise ValueError(f"unknown dynamics mode {mode!r}; use one of {MODES}")
    validate_params(params)
    steps = _check_steps(duration, dt, actuation.period)
    derivative = make_derivative(params, actuation, mode)
    y = np.zeros(6) if initial is None else initial.as_array()
    states = np.empty((steps + 1, 6))
    states[0] = y
    for i in range(steps):
        t = i * dt
        try:
            y = rk4_step(y, t, dt, derivative)
        except WormsimError as exc:
            raise SimulationError(str(exc), t=t) from exc
        if not np.all(np.isfinite(y)):
            raise SimulationError(f"non-finite state {y!r}", t=t)
        states[i + 1] = y
    bodies = _reconstruct_all(params, actuation, states, dt) if full_bodies else None
    meta = {"mode": mode, "gait": getattr(actuation, "kind", "custom"),
            "n": params.n, "dt": dt, "params_hash": params_hash(params)}
    return Trajectory(dt=dt, states=states, mode=mode, bodies=bodies, meta=meta)


def _chain_from_anchor(anchor, pose, shape):
    """Place all plates given the pose of one anchored plate and the shape."""
    xa, ya, tha = pose
    cphi = _cum0(shape.phi)
    theta = tha + cphi[anchor] - cphi
    beta = theta[:-1] - 0.5 * shape.phi
    cLx = _cum0(shape.lbar * np.cos(beta))
    cLy = _cum0(shape.lbar * np.sin(beta))
    x = xa + cLx[anchor] - cLx
    y = ya + cLy[anchor] - cLy
    return x, y, theta


def kinematic_predict(params: RobotParams, actuation, duration: float, dt: float,
                      full_bodies: bool = False) -> Trajectory:
    """No-slip baseline trajectory from the anchor rule or schedule.

    Head velocities in the output are backward differences of the head pose
    (zero at the first sample); only the poses are kinematically meaningful.
    """
    validate_params(params)
    steps = _check_steps(duration, dt, actuation.period)

    def shape_at(t):
        s = actuation.sample(t)
        return segment_shape(s.l_l, s.l_r, s.dl_l, s.dl_r, s.ddl_l, s.ddl_r, params.r)

    shape = shape_at(0.0)
    x, y, theta = _chain_from_anchor(0, (0.0, 0.0, 0.0), shape)
    states = np.zeros((steps + 1, 6))
    bodies = np.empty((steps + 1, params.n + 1, 3)) if full_bodies else None
    if full_bodies:
        bodies[0] = np.column_stack([x, y, theta])
    for i in range(1, steps + 1):
        t = i * dt
        # the anchor in effect over [t-dt, t] is the one at the interval
        # start; it stays frozen at the pose it had when the interval began
        a = actuation.anchor_at(t - dt) - 1  # to 0-based plate index
        shape = shape_at(t)
        x, y, theta = _chain_from_anchor(a, (x[a], y[a], theta[a]), shape)
        states[i, :3] = (x[0], y[0], theta[0])
        states[i, 3:] = (states[i, :3] - states[i - 1, :3]) / dt
        if full_bodies:
            bodies[i] = np.column_stack([x, y, theta])
    meta = {"mode": "kinematic", "gait": getattr(actuation, "kind", "custom"),
            "n": params.n, "dt": dt, "params_hash": params_hash(params)}
    return Trajectory(dt=dt, states=states, mode="kinematic", bodies=bodies, meta=meta)


def _reconstruct_all(params, actuation, states, dt):
    out = np.empty((states.shape[0], params.n + 1, 3))
    for i in range(states.shape[0]):
        st = HeadState.from_array(states[i], t=i * dt)
        b = reconstruct_bodies(st, actuation.sample(i * dt), params)
        out[i] = np.column_stack([b.x, b.y, b.theta])
    return out
