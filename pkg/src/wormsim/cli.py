"""Batch front-end: run configs in, CSV/JSON (and optional figures) out.

Subcommands:
    simulate        one run, trajectory CSV + metrics JSON
    compare         paper vs projection vs kinematic on the same gait
    gait-check      dense actuation audit, per-segment signal CSV
    operators-dump  print the integer operator matrices for inspection
    report          like simulate, plus rendered figures

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 gait bound or
smoothness violation. Log verbosity comes from the WORMSIM_LOG environment
variable (debug/info/warning); there are no logging flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from .analysis import compute_metrics
from .config import RunConfig, load_config, to_dict
from .errors import ConfigError, GaitError, WormsimError
from .gait import build_gait
from .model import build_operators
from .simulate import Trajectory, kinematic_predict, simulate

log = logging.getLogger("wormsim")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_GAIT = 4


def _fmt(v: float) -> str:
    return format(v, ".9g")


def write_trajectory_csv(path, traj: Trajectory):
    """Stable schema: t,x1,y1,theta1,vx1,vy1,omega1[,x_i,y_i,theta_i ...]."""
    header = ["t", "x1", "y1", "theta1", "vx1", "vy1", "omega1"]
    nbodies = 0 if traj.bodies is None else traj.bodies.shape[1]
    for i in range(2, nbodies + 1):
        header += [f"x_{i}", f"y_{i}", f"theta_{i}"]
    lines = [",".join(header)]
    for i in range(traj.states.shape[0]):
        t = traj.t0 + i * traj.dt
        vals = [_fmt(v) for v in traj.states[i]]
        if traj.bodies is not None:
            vals += [_fmt(v) for v in traj.bodies[i, 1:].ravel()]
        lines.append(f"{t:.6f}," + ",".join(vals))
    _ensure_dir(path)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    log.info("wrote trajectory to %s", path)


def write_json(path, obj):
    _ensure_dir(path)
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %s", path)


def _ensure_dir(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def _resolve_out(cfg: RunConfig, out_dir):
    traj_path = cfg.output.trajectory_path
    metrics_path = cfg.output.metrics_path
    if out_dir:
        traj_path = os.path.join(out_dir, os.path.basename(traj_path))
        metrics_path = os.path.join(out_dir, os.path.basename(metrics_path))
    return traj_path, metrics_path


def run_mode(cfg: RunConfig, mode: str) -> Trajectory:
    gait = build_gait(cfg.gait, cfg.robot)
    if mode == "kinematic":
        return kinematic_predict(cfg.robot, gait, cfg.duration, cfg.sim.dt,
                                 full_bodies=cfg.sim.full_bodies)
    return simulate(cfg.robot, gait, mode, cfg.duration, cfg.sim.dt,
                    full_bodies=cfg.sim.full_bodies)


def cmd_simulate(config_path, out_dir=None) -> int:
    cfg = load_config(config_path)
    traj = run_mode(cfg, cfg.sim.mode)
    metrics = compute_metrics(traj, cfg.gait.period, cfg.sim.transient_cycles,
                              kind=cfg.gait.kind)
    traj_path, metrics_path = _resolve_out(cfg, out_dir)
    write_trajectory_csv(traj_path, traj)
    write_json(metrics_path, metrics.to_dict())
    return EXIT_OK


def _traj_rms(a: Trajectory, b: Trajectory) -> float:
    dx = a.states[:, 0] - b.states[:, 0]
    dy = a.states[:, 1] - b.states[:, 1]
    return float(np.sqrt(np.mean(dx * dx + dy * dy)))


def cmd_compare(config_path, out_dir=None) -> int:
    """All three model variants on the same gait, side by side."""
    cfg = load_config(config_path)
    modes = ("paper", "projection", "kinematic")
    trajs = {mode: run_mode(cfg, mode) for mode in modes}
    result = {
        mode: compute_metrics(trajs[mode], cfg.gait.period,
                              cfg.sim.transient_cycles, kind=cfg.gait.kind).to_dict()
        for mode in modes
    }
    result["rms"] = {
        "paper_vs_projection": _traj_rms(trajs["paper"], trajs["projection"]),
        "paper_vs_kinematic": _traj_rms(trajs["paper"], trajs["kinematic"]),
        "projection_vs_kinematic": _traj_rms(trajs["projection"], trajs["kinematic"]),
    }
    traj_path, metrics_path = _resolve_out(cfg, out_dir)
    for mode in modes:
        root, ext = os.path.splitext(traj_path)
        write_trajectory_csv(f"{root}_{mode}{ext}", trajs[mode])
    write_json(metrics_path, result)
    return EXIT_OK


def _check_signals(cfg: RunConfig):
    """Dense audit of the actuation signals over one period.

    Raises GaitError (with segment, side, time) on the first bound or
    smoothness violation found.
    """
    gait = build_gait(cfg.gait, cfg.robot)
    T = cfg.gait.period
    tol = 1e-9
    h = 1e-5 * T
    knots = gait.knot_times()
    dense = np.linspace(0.0, T, 2001)
    samples = [gait.sample(t) for t in dense]
    sides = (("left", lambda s: (s.l_l, s.dl_l, s.ddl_l)),
             ("right", lambda s: (s.l_r, s.dl_r, s.ddl_r)))
    for it, t in enumerate(dense):
        s = samples[it]
        for side, pick in sides:
            l = pick(s)[0]
            if np.any(l < cfg.gait.l_min - tol) or np.any(l > cfg.gait.l_max + tol):
                i = int(np.argmax((l < cfg.gait.l_min - tol) | (l > cfg.gait.l_max + tol)))
                raise GaitError("length outside [l_min, l_max]",
                                segment=i + 1, side=side, t=t)
        gap = np.abs(s.l_r - s.l_l)
        if np.any(gap >= 2.0 * cfg.robot.r):
            i = int(np.argmax(gap >= 2.0 * cfg.robot.r))
            raise GaitError("|l_r - l_l| reached the closure limit 2r",
                            segment=i + 1, side="both", t=t)
    # derivative consistency away from knots, then second-derivative
    # continuity across each knot
    for t in np.linspace(0.05 * T, 0.95 * T, 97):
        if any(abs(t - k) < 3.0 * h for k in knots):
            continue
        sm, s0, sp = gait.sample(t - h), gait.sample(t), gait.sample(t + h)
        for side, pick in sides:
            lm, l0, lp = pick(sm)[0], pick(s0)[0], pick(sp)[0]
            dl = pick(s0)[1]
            ddl = pick(s0)[2]
            fd1 = (lp - lm) / (2.0 * h)
            fd2 = (lp - 2.0 * l0 + lm) / (h * h)
            scale1 = 1.0 + np.max(np.abs(dl))
            scale2 = 1.0 + np.max(np.abs(ddl))
            if np.any(np.abs(fd1 - dl) > 1e-4 * scale1):
                i = int(np.argmax(np.abs(fd1 - dl)))
                raise GaitError("first derivative inconsistent with signal",
                                segment=i + 1, side=side, t=t)
            if np.any(np.abs(fd2 - ddl) > 1e-3 * scale2):
                i = int(np.argmax(np.abs(fd2 - ddl)))
                raise GaitError("second derivative inconsistent with signal",
                                segment=i + 1, side=side, t=t)
    dd_scale = 1.0 + max(np.max(np.abs(s.ddl_l)) + np.max(np.abs(s.ddl_r))
                         for s in samples)
    eps_t = 1e-9 * T
    for k in knots:
        sm, sp = gait.sample(k - eps_t), gait.sample(k + eps_t)
        for side, pick in sides:
            jump = np.max(np.abs(pick(sp)[2] - pick(sm)[2]))
            if jump > 1e-5 * dd_scale:
                i = int(np.argmax(np.abs(pick(sp)[2] - pick(sm)[2])))
                raise GaitError("second derivative jumps at a knot",
                                segment=i + 1, side=side, t=k)
    return gait, dense, samples


def cmd_gait_check(config_path, out_dir=None) -> int:
    cfg = load_config(config_path)
    gait, dense, samples = _check_signals(cfg)
    path = "gait_signals.csv"
    if out_dir:
        path = os.path.join(out_dir, path)
    header = ["t"]
    for i in range(1, cfg.robot.n + 1):
        header += [f"l{i}_left", f"l{i}_right"]
    lines = [",".join(header)]
    for t, s in zip(dense, samples):
        vals = []
        for i in range(cfg.robot.n):
            vals += [_fmt(s.l_l[i]), _fmt(s.l_r[i])]
        lines.append(f"{t:.6f}," + ",".join(vals))
    _ensure_dir(path)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    log.info("wrote gait signals to %s", path)
    return EXIT_OK


def cmd_operators_dump(n) -> int:
    ops = build_operators(n)
    for name, mat in (("D1", ops.D1), ("D2", ops.D2), ("D3", ops.D3)):
        print(f"{name} ({mat.shape[0]}x{mat.shape[1]}):")
        for row in mat:
            print("  " + " ".join(f"{v:3d}" for v in row))
    print(f"e: {' '.join(str(v) for v in ops.e)}")
    return EXIT_OK


def cmd_report(config_path, out_dir=None) -> int:
    from .report import render_report

    cfg = load_config(config_path)
    traj = run_mode(cfg, cfg.sim.mode)
    metrics = compute_metrics(traj, cfg.gait.period, cfg.sim.transient_cycles,
                              kind=cfg.gait.kind)
    traj_path, metrics_path = _resolve_out(cfg, out_dir)
    write_trajectory_csv(traj_path, traj)
    write_json(metrics_path, metrics.to_dict())
    fig_dir = out_dir if out_dir else os.path.dirname(os.path.abspath(traj_path))
    figures = render_report(cfg, traj, fig_dir)
    for f in figures:
        log.info("wrote figure %s", f)
    print("\n".join(figures))
    return EXIT_OK


def _build_parser():
    p = argparse.ArgumentParser(prog="wormsim",
                                description="segmented-worm planar locomotion simulator")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("simulate", "compare", "gait-check", "report"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="run-config JSON path")
        sp.add_argument("--out", default=None, help="directory overriding output paths")
    sp = sub.add_parser("operators-dump")
    sp.add_argument("n", type=int, help="segment count")
    return p


def main(argv=None) -> int:
    level = os.environ.get("WORMSIM_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "operators-dump":
            if args.n < 1:
                print("error: n must be >= 1", file=sys.stderr)
                return EXIT_CONFIG
            return cmd_operators_dump(args.n)
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out)
        if args.command == "compare":
            return cmd_compare(args.config, args.out)
        if args.command == "gait-check":
            return cmd_gait_check(args.config, args.out)
        if args.command == "report":
            return cmd_report(args.config, args.out)
        raise AssertionError(args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GaitError as exc:
        print(f"gait violation: {exc}", file=sys.stderr)
        return EXIT_GAIT
    except WormsimError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as exc:
        # the exit-code contract has no slot for internal errors; surface
        # them as numerical failures, with a traceback under debug logging
        if log.isEnabledFor(logging.DEBUG):
            raise
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
