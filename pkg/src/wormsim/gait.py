"""Prescribed actuator-length trajectories for the built-in gait families.

Every built-in waveform is assembled from periodic piecewise quintic
smoothstep channels: between consecutive knots the value moves by
w(u) = u^3 (10 - 15 u + 6 u^2), which has zero slope and curvature at both
ends. Signals are therefore C2 everywhere, which the dynamics needs because
it consumes the second derivatives of the lengths directly.

Gait families (per-segment phase offsets default to i/n, so the
contraction wave starts at the head segment and travels tailward):

rectilinear   midline contracts l_max -> l_min -> l_max over the duty
              window, left and right identical.
circular      same wave with a constant left/right split delta.
sidewinding   split flips sign every half period through a smoothstep
              transition synchronized with the segment's own wave.
custom        per-segment, per-side waypoint tables, smoothstep
              interpolated and made periodic.

Turning gaits shrink the midline sweep by |delta|/2 on both ends so each
individual side still stays inside [l_min, l_max].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._jit import njit
from .errors import GaitError
from .model import RobotParams

__all__ = [
    "GaitConfig",
    "ActuationSample",
    "ActuationTrajectory",
    "build_gait",
    "sample",
    "anchor_at",
    "smoothstep",
]

GAIT_KINDS = ("rectilinear", "circular", "sidewinding", "custom")


def smoothstep(u):
    """Quintic smoothstep and its first two derivatives on [0, 1]."""
    u = np.asarray(u, dtype=float)
    w = u ** 3 * (10.0 + u * (6.0 * u - 15.0))
    wp = 30.0 * u ** 2 * (1.0 - u) ** 2
    wpp = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    return w, wp, wpp


@dataclass(frozen=True)
class GaitConfig:
    kind: str = "rectilinear"
    period: float = 6.0
    l_min: float = 0.08
    l_max: float = 0.12
    delta: float = 0.01
    duty: float = 1.0 / 3.0
    phase_offsets: Optional[Sequence[float]] = None
    # custom gaits: waypoints[i] = [left_knots, right_knots], each a list of
    # [time_fraction, length] pairs with strictly increasing fractions
    waypoints: Optional[Sequence] = None
    # [[t0_fraction, t1_fraction, body_index], ...] covering [0, 1); body
    # indices are 1-based with the head plate as body 1
    anchor_schedule: Optional[Sequence] = None


@dataclass(frozen=True)
class ActuationSample:
    """Per-segment left/right lengths and their first two derivatives."""

    l_l: np.ndarray
    l_r: np.ndarray
    dl_l: np.ndarray
    dl_r: np.ndarray
    ddl_l: np.ndarray
    ddl_r: np.ndarray

    @property
    def lbar(self):
        return 0.5 * (self.l_l + self.l_r)


@njit(cache=True, inline="always")
def _eval_at(s, period, F, V):  # pragma: no cover
    # F: knot fractions ascending in [0, 1); V: values at those knots.
    # Interval k runs from F[k] to F[k+1] (wrapping to F[0]+1 at the end)
    # and moves the value from V[k] to V[k+1] by quintic smoothstep.
    m = F.shape[0]
    k = m - 1
    for j in range(m - 1):
        if s < F[j + 1]:
            k = j
            break
    f0 = F[k]
    v0 = V[k]
    if k == m - 1:
        f1 = F[0] + 1.0
        v1 = V[0]
    else:
        f1 = F[k + 1]
        v1 = V[k + 1]
    ds = f1 - f0
    u = (s - f0) / ds
    dv = v1 - v0
    w = u * u * u * (10.0 + u * (6.0 * u - 15.0))
    wp = 30.0 * u * u * (1.0 - u) * (1.0 - u)
    wpp = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    sc = 1.0 / (ds * period)
    return v0 + dv * w, dv * wp * sc, dv * wpp * sc * sc


@njit(cache=True)
def _local_phase(t, period, offset):  # pragma: no cover
    tau = np.fmod(t, period)
    if tau < 0.0:
        tau += period
    s = tau / period - offset
    if s < 0.0:
        s += 1.0
    if s >= 1.0:
        s -= 1.0
    return s


@njit(cache=True)
def _eval_channel(t, period, offsets, F, V, out_v, out_dv, out_ddv):  # pragma: no cover
    for i in range(offsets.shape[0]):
        s = _local_phase(t, period, offsets[i])
        out_v[i], out_dv[i], out_ddv[i] = _eval_at(s, period, F, V)
    return 0


@njit(cache=True)
def _sample_builtin(t, period, offsets, Fb, Vb, Fs, Vs, cl, cr,
                    ll, lr, dll, dlr, ddll, ddlr):  # pragma: no cover
    # fused base + split evaluation: l_left = base + cl*split, right likewise
    for i in range(offsets.shape[0]):
        s = _local_phase(t, period, offsets[i])
        b, db, ddb = _eval_at(s, period, Fb, Vb)
        sp, dsp, ddsp = _eval_at(s, period, Fs, Vs)
        ll[i] = b + cl * sp
        lr[i] = b + cr * sp
        dll[i] = db + cl * dsp
        dlr[i] = db + cr * dsp
        ddll[i] = ddb + cl * ddsp
        ddlr[i] = ddb + cr * ddsp
    return 0


class ActuationTrajectory:
    """Sampled view of a built gait: lengths, derivatives, anchor rule.

    Instances are immutable after construction and safe to sample from
    multiple runs concurrently through sample(); sample_arrays() reuses
    per-instance buffers and is meant for a single integration loop.
    """

    def __init__(self, n, period, kind, channels, anchor_schedule=None, config=None):
        self.n = n
        self.period = period
        self.kind = kind
        # channels: [(offsets, F, V, base coeffs)] as (base, optional split)
        self._channels = channels
        self.anchor_schedule = anchor_schedule
        self.config = config
        self._out = tuple(np.empty(n) for _ in range(6))
        self._fast_args = self._build_fast_args()

    def _build_fast_args(self):
        offsets, Fb, Vb, _, _ = self._channels[0]
        if len(self._channels) > 1:
            _, Fs, Vs, cl, cr = self._channels[1]
        else:
            Fs, Vs, cl, cr = np.zeros(1), np.zeros(1), 0.0, 0.0
        return (self.period, offsets, Fb, Vb, Fs, Vs, float(cl), float(cr))

    def sample_arrays(self, t):
        """Fast path: returns (l_l, l_r, dl_l, dl_r, ddl_l, ddl_r) views of
        internal buffers, overwritten by the next call."""
        period, offsets, Fb, Vb, Fs, Vs, cl, cr = self._fast_args
        _sample_builtin(t, period, offsets, Fb, Vb, Fs, Vs, cl, cr, *self._out)
        return self._out

    def sample(self, t) -> ActuationSample:
        arrays = self.sample_arrays(t)
        return ActuationSample(*(a.copy() for a in arrays))

    def anchor_at(self, t) -> int:
        """Anchored body (1-based, head = 1) at time t.

        Follows the explicit schedule when one was configured; otherwise
        anchors the rear plate of the currently most contracted segment,
        ties broken toward the head.
        """
        if self.anchor_schedule is not None:
            s = math.fmod(t / self.period, 1.0)
            if s < 0.0:
                s += 1.0
            for f0, f1, body in self.anchor_schedule:
                if f0 <= s < f1:
                    return body
        lbar = self.sample(t).lbar
        return int(np.argmin(lbar)) + 2  # rear plate of segment argmin+1

    def knot_times(self):
        """Sorted times in [0, period) where any channel changes polynomial."""
        fracs = set()
        for offsets, F, V, _, _ in self._channels:
            for off in np.atleast_1d(offsets):
                for f in F:
                    fracs.add(math.fmod(f + off, 1.0))
        return sorted(f * self.period for f in fracs)


def sample(traj: ActuationTrajectory, t) -> ActuationSample:
    """Periodic evaluation of the trajectory at time t."""
    return traj.sample(t)


def anchor_at(traj: ActuationTrajectory, t) -> int:
    return traj.anchor_at(t)


def _validate_common(cfg: GaitConfig, robot: RobotParams):
    if cfg.kind not in GAIT_KINDS:
        raise GaitError(f"unknown gait kind {cfg.kind!r}")
    if not (cfg.period > 0.0 and math.isfinite(cfg.period)):
        raise GaitError(f"period must be positive, got {cfg.period!r}")
    if not (0.0 < cfg.l_min <= cfg.l_max):
        raise GaitError(
            f"need 0 < l_min <= l_max, got l_min={cfg.l_min!r} l_max={cfg.l_max!r}"
        )
    if not (0.0 < cfg.duty < 1.0):
        raise GaitError(f"duty must lie in (0, 1), got {cfg.duty!r}")
    swing = cfg.l_max - cfg.l_min
    if cfg.kind in ("circular", "sidewinding"):
        # the split must clear both the trapezoid closure margin and the
        # per-side band [l_min, l_max] after the midline sweep is shrunk
        if abs(cfg.delta) >= 2.0 * robot.r - swing:
            raise GaitError(
                f"|delta|={abs(cfg.delta):.6g} exceeds the closure margin "
                f"2r - (l_max - l_min) = {2.0 * robot.r - swing:.6g}"
            )
        if abs(cfg.delta) > swing:
            raise GaitError(
                f"|delta|={abs(cfg.delta):.6g} exceeds l_max - l_min = {swing:.6g}, "
                "sides would leave the configured length band"
            )
    if swing >= 2.0 * robot.r:
        raise GaitError(
            f"l_max - l_min = {swing:.6g} leaves no closure margin against 2r"
        )


def _offsets(cfg: GaitConfig, n: int):
    if cfg.phase_offsets is None:
        return np.arange(n) / n
    off = np.asarray(cfg.phase_offsets, dtype=float)
    if off.shape != (n,):
        raise GaitError(f"phase_offsets must have one entry per segment ({n})")
    if np.any(off < 0.0) or np.any(off >= 1.0):
        raise GaitError("phase_offsets must lie in [0, 1)")
    return off


def _validate_schedule(schedule, n):
    if schedule is None:
        return None
    out = []
    prev_end = 0.0
    for entry in schedule:
        f0, f1, body = float(entry[0]), float(entry[1]), int(entry[2])
        if not (0.0 <= f0 < f1 <= 1.0):
            raise GaitError(f"anchor interval [{f0}, {f1}) is not within [0, 1)")
        if abs(f0 - prev_end) > 1e-12:
            raise GaitError("anchor schedule must cover [0, 1) without gaps")
        if not (1 <= body <= n + 1):
            raise GaitError(f"anchor body {body} outside 1..{n + 1}")
        out.append((f0, f1, body))
        prev_end = f1
    if abs(prev_end - 1.0) > 1e-12:
        raise GaitError("anchor schedule must cover [0, 1) without gaps")
    return tuple(out)


def _waypoint_channels(cfg: GaitConfig, n: int):
    if cfg.waypoints is None or len(cfg.waypoints) != n:
        raise GaitError(f"custom gait needs waypoints for all {n} segments")
    channels = []
    for i, entry in enumerate(cfg.waypoints):
        if len(entry) != 2:
            raise GaitError(f"segment {i + 1}: expected [left_knots, right_knots]")
        for side_idx, knots in enumerate(entry):
            side = "left" if side_idx == 0 else "right"
            pts = np.asarray(knots, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
                raise GaitError(
                    f"segment {i + 1} {side}: knots must be [[fraction, length], ...]"
                )
            F, V = pts[:, 0], pts[:, 1]
            if np.any(np.diff(F) <= 0.0):
                raise GaitError(
                    f"segment {i + 1} {side}: knot fractions must be strictly increasing"
                )
            if F[0] < 0.0 or F[-1] >= 1.0:
                raise GaitError(
                    f"segment {i + 1} {side}: knot fractions must lie in [0, 1)"
                )
            if np.any(V < cfg.l_min - 1e-12) or np.any(V > cfg.l_max + 1e-12):
                raise GaitError(
                    f"segment {i + 1} {side}: length outside [l_min, l_max]"
                )
            mask = np.zeros(n)
            mask[i] = 1.0
            coeff = (1.0, 0.0) if side_idx == 0 else (0.0, 1.0)
            # per-segment channel: zero phase, masked onto one side
            channels.append((np.zeros(n), F.copy(), V.copy(), coeff, mask))
    return channels


class _WaypointTrajectory(ActuationTrajectory):
    """Custom gait: one channel per segment side, applied through a mask."""

    def _build_fast_args(self):
        return None

    def sample_arrays(self, t):
        ll, lr, dll, dlr, ddll, ddlr = self._out
        ll.fill(0.0)
        lr.fill(0.0)
        dll.fill(0.0)
        dlr.fill(0.0)
        ddll.fill(0.0)
        ddlr.fill(0.0)
        one = np.zeros(1)
        buf = np.empty(1)
        dbuf = np.empty(1)
        ddbuf = np.empty(1)
        for offsets, F, V, coeff, mask in self._channels:
            _eval_channel(t, self.period, one, F, V, buf, dbuf, ddbuf)
            i = int(np.argmax(mask))
            if coeff[0]:
                ll[i] += buf[0]
                dll[i] += dbuf[0]
                ddll[i] += ddbuf[0]
            else:
                lr[i] += buf[0]
                dlr[i] += dbuf[0]
                ddlr[i] += ddbuf[0]
        return ll, lr, dll, dlr, ddll, ddlr

    def knot_times(self):
        fracs = set()
        for _, F, V, _, _ in self._channels:
            fracs.update(float(f) for f in F)
        return sorted(f * self.period for f in fracs)


def build_gait(cfg: GaitConfig, robot: RobotParams) -> ActuationTrajectory:
    """Validate a gait config against the robot geometry and build it."""
    _validate_common(cfg, robot)
    n = robot.n
    schedule = _validate_schedule(cfg.anchor_schedule, n)
    if cfg.kind == "custom":
        channels = _waypoint_channels(cfg, n)
        return _WaypointTrajectory(n, cfg.period, cfg.kind, channels,
                                   anchor_schedule=schedule, config=cfg)
    offsets = _offsets(cfg, n)
    delta = cfg.delta if cfg.kind in ("circular", "sidewinding") else 0.0
    hi = cfg.l_max - 0.5 * abs(delta)
    lo = cfg.l_min + 0.5 * abs(delta)
    base_F = np.array([0.0, 0.5 * cfg.duty, cfg.duty])
    base_V = np.array([hi, lo, hi])
    channels = [(offsets, base_F, base_V, 1.0, 1.0)]
    if cfg.kind == "circular":
        channels.append((offsets, np.array([0.0]), np.array([delta]), -0.5, 0.5))
    elif cfg.kind == "sidewinding":
        tr = 0.5 * cfg.duty
        split_F = np.array([0.0, 0.5 - tr, 0.5, 1.0 - tr])
        split_V = np.array([delta, delta, -delta, -delta])
        channels.append((offsets, split_F, split_V, -0.5, 0.5))
    return ActuationTrajectory(n, cfg.period, cfg.kind, channels,
                               anchor_schedule=schedule, config=cfg)
