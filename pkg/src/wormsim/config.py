"""JSON run-config parsing, validation, and round-trip serialization.

A run config has four objects: robot, gait, sim, output. Every field has a
default, unknown keys are rejected, and validation failures name the full
key path (e.g. "robot.m") so batch users can fix configs without reading
tracebacks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError, GaitError
from .gait import GAIT_KINDS, GaitConfig, build_gait
from .model import FrictionParams, RobotParams
from .simulate import DT_GUARD_FACTOR

__all__ = ["SimConfig", "OutputConfig", "RunConfig", "load_config", "parse_config"]

SIM_MODES = ("paper", "projection", "kinematic")


@dataclass(frozen=True)
class SimConfig:
    mode: str = "paper"
    dt: float = 2.5e-4
    cycles: int = 5
    transient_cycles: int = 2
    full_bodies: bool = False


@dataclass(frozen=True)
class OutputConfig:
    trajectory_path: str = "trajectory.csv"
    metrics_path: str = "metrics.json"


@dataclass(frozen=True)
class RunConfig:
    robot: RobotParams = field(default_factory=RobotParams)
    gait: GaitConfig = field(default_factory=GaitConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def duration(self):
        return self.sim.cycles * self.gait.period


def _take(obj, prefix, known):
    for key in obj:
        if key not in known:
            raise ConfigError(f"{prefix}{key}", "unknown key")


def _num(obj, prefix, key, default, *, positive=False, nonneg=False):
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{prefix}{key}", f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{prefix}{key}", "must be finite")
    if positive and v <= 0.0:
        raise ConfigError(f"{prefix}{key}", f"must be > 0, got {v!r}")
    if nonneg and v < 0.0:
        raise ConfigError(f"{prefix}{key}", f"must be >= 0, got {v!r}")
    return v


def _int(obj, prefix, key, default, minimum):
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{prefix}{key}", f"expected an integer, got {v!r}")
    if v < minimum:
        raise ConfigError(f"{prefix}{key}", f"must be >= {minimum}, got {v}")
    return v


def _parse_robot(obj) -> RobotParams:
    _take(obj, "robot.", {"n", "r", "m", "J", "g", "friction"})
    fr_obj = obj.get("friction", {})
    if not isinstance(fr_obj, dict):
        raise ConfigError("robot.friction", "expected an object")
    _take(fr_obj, "robot.friction.",
          {"xi_forward", "xi_backward", "xi_normal", "smoothing_eps"})
    fr = FrictionParams(
        xi_forward=_num(fr_obj, "robot.friction.", "xi_forward", 0.2, nonneg=True),
        xi_backward=_num(fr_obj, "robot.friction.", "xi_backward", 0.8, nonneg=True),
        xi_normal=_num(fr_obj, "robot.friction.", "xi_normal", 0.6, nonneg=True),
        smoothing_eps=_num(fr_obj, "robot.friction.", "smoothing_eps", 1e-3,
                           positive=True),
    )
    return RobotParams(
        n=_int(obj, "robot.", "n", 6, minimum=1),
        r=_num(obj, "robot.", "r", 0.1, positive=True),
        m=_num(obj, "robot.", "m", 0.1, positive=True),
        J=_num(obj, "robot.", "J", 8.33e-5, positive=True),
        g=_num(obj, "robot.", "g", 9.81, positive=True),
        friction=fr,
    )


def _freeze(seq):
    if isinstance(seq, (list, tuple)):
        return tuple(_freeze(v) for v in seq)
    return seq


def _parse_gait(obj) -> GaitConfig:
    _take(obj, "gait.", {"kind", "period", "l_min", "l_max", "delta", "duty",
                         "phase_offsets", "waypoints", "anchor_schedule"})
    kind = obj.get("kind", "rectilinear")
    if kind not in GAIT_KINDS:
        raise ConfigError("gait.kind", f"must be one of {GAIT_KINDS}, got {kind!r}")
    l_min = _num(obj, "gait.", "l_min", 0.08, positive=True)
    l_max = _num(obj, "gait.", "l_max", 0.12, positive=True)
    if l_max < l_min:
        raise ConfigError("gait.l_max", f"must be >= l_min={l_min!r}")
    duty = _num(obj, "gait.", "duty", 1.0 / 3.0)
    if not 0.0 < duty < 1.0:
        raise ConfigError("gait.duty", f"must lie in (0, 1), got {duty!r}")
    offsets = obj.get("phase_offsets")
    waypoints = obj.get("waypoints")
    schedule = obj.get("anchor_schedule")
    return GaitConfig(
        kind=kind,
        period=_num(obj, "gait.", "period", 6.0, positive=True),
        l_min=l_min,
        l_max=l_max,
        delta=_num(obj, "gait.", "delta", 0.01),
        duty=duty,
        phase_offsets=_freeze(offsets) if offsets is not None else None,
        waypoints=_freeze(waypoints) if waypoints is not None else None,
        anchor_schedule=_freeze(schedule) if schedule is not None else None,
    )


def _parse_sim(obj, gait: GaitConfig) -> SimConfig:
    _take(obj, "sim.", {"mode", "dt", "cycles", "transient_cycles", "full_bodies"})
    mode = obj.get("mode", "paper")
    if mode not in SIM_MODES:
        raise ConfigError("sim.mode", f"must be one of {SIM_MODES}, got {mode!r}")
    dt = _num(obj, "sim.", "dt", 2.5e-4, positive=True)
    if dt > gait.period / DT_GUARD_FACTOR * (1.0 + 1e-12):
        raise ConfigError(
            "sim.dt",
            f"too coarse: need at least {DT_GUARD_FACTOR} steps per gait "
            f"period ({gait.period / DT_GUARD_FACTOR:.6g})",
        )
    cycles = _int(obj, "sim.", "cycles", 5, minimum=1)
    transient = _int(obj, "sim.", "transient_cycles", 2, minimum=0)
    if transient >= cycles:
        raise ConfigError("sim.transient_cycles",
                          f"must be < cycles={cycles}, got {transient}")
    full_bodies = obj.get("full_bodies", False)
    if not isinstance(full_bodies, bool):
        raise ConfigError("sim.full_bodies", f"expected a boolean, got {full_bodies!r}")
    return SimConfig(mode=mode, dt=dt, cycles=cycles, transient_cycles=transient,
                     full_bodies=full_bodies)


def _parse_output(obj) -> OutputConfig:
    _take(obj, "output.", {"trajectory_path", "metrics_path"})
    traj = obj.get("trajectory_path", "trajectory.csv")
    metr = obj.get("metrics_path", "metrics.json")
    for key, v in (("trajectory_path", traj), ("metrics_path", metr)):
        if not isinstance(v, str) or not v:
            raise ConfigError(f"output.{key}", f"expected a non-empty path, got {v!r}")
    return OutputConfig(trajectory_path=traj, metrics_path=metr)


def parse_config(data: dict) -> RunConfig:
    """Build a validated RunConfig from a parsed JSON object."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    _take(data, "", {"robot", "gait", "sim", "output"})
    for key in ("robot", "gait", "sim", "output"):
        if key in data and not isinstance(data[key], dict):
            raise ConfigError(key, "expected an object")
    robot = _parse_robot(data.get("robot", {}))
    gait = _parse_gait(data.get("gait", {}))
    sim = _parse_sim(data.get("sim", {}), gait)
    output = _parse_output(data.get("output", {}))
    # full structural gait validation needs the robot geometry
    try:
        build_gait(gait, robot)
    except GaitError as exc:
        raise ConfigError("gait", str(exc)) from exc
    return RunConfig(robot=robot, gait=gait, sim=sim, output=output)


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    return parse_config(data)


def _unfreeze(seq):
    if isinstance(seq, tuple):
        return [_unfreeze(v) for v in seq]
    return seq


def to_dict(cfg: RunConfig) -> dict:
    """Serialize with every field present; parse_config(to_dict(c)) == c."""
    return {
        "robot": {
            "n": cfg.robot.n,
            "r": cfg.robot.r,
            "m": cfg.robot.m,
            "J": cfg.robot.J,
            "g": cfg.robot.g,
            "friction": {
                "xi_forward": cfg.robot.friction.xi_forward,
                "xi_backward": cfg.robot.friction.xi_backward,
                "xi_normal": cfg.robot.friction.xi_normal,
                "smoothing_eps": cfg.robot.friction.smoothing_eps,
            },
        },
        "gait": {
            "kind": cfg.gait.kind,
            "period": cfg.gait.period,
            "l_min": cfg.gait.l_min,
            "l_max": cfg.gait.l_max,
            "delta": cfg.gait.delta,
            "duty": cfg.gait.duty,
            "phase_offsets": _unfreeze(cfg.gait.phase_offsets),
            "waypoints": _unfreeze(cfg.gait.waypoints),
            "anchor_schedule": _unfreeze(cfg.gait.anchor_schedule),
        },
        "sim": {
            "mode": cfg.sim.mode,
            "dt": cfg.sim.dt,
            "cycles": cfg.sim.cycles,
            "transient_cycles": cfg.sim.transient_cycles,
            "full_bodies": cfg.sim.full_bodies,
        },
        "output": {
            "trajectory_path": cfg.output.trajectory_path,
            "metrics_path": cfg.output.metrics_path,
        },
    }
