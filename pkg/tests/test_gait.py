import numpy as np
import pytest

from wormsim import GaitConfig, GaitError, RobotParams, anchor_at, build_gait, sample
from wormsim.gait import smoothstep

ROBOT = RobotParams()


def test_default_rectilinear_offsets_and_bounds():
    gait = build_gait(GaitConfig(), ROBOT)
    assert gait.n == 6 and gait.period == 6.0
    rng = np.random.RandomState(0)
    for t in rng.uniform(0.0, 24.0, 1000):
        s = sample(gait, t)
        assert np.all(s.l_l == s.l_r)
        assert np.all(s.l_l >= 0.08 - 1e-12) and np.all(s.l_l <= 0.12 + 1e-12)
        assert np.all(np.abs(s.l_r - s.l_l) < 2 * ROBOT.r)


def test_constant_gait_degenerates():
    gait = build_gait(GaitConfig(l_min=0.1, l_max=0.1), ROBOT)
    for t in (0.0, 1.7, 5.2):
        s = sample(gait, t)
        assert np.all(s.l_l == 0.1) and np.all(s.l_r == 0.1)
        assert np.all(s.dl_l == 0.0) and np.all(s.ddl_l == 0.0)


def test_circular_zero_delta_reduces_to_rectilinear():
    g0 = build_gait(GaitConfig(kind="rectilinear"), ROBOT)
    g1 = build_gait(GaitConfig(kind="circular", delta=0.0), ROBOT)
    for t in (0.3, 2.1, 4.4):
        a, b = sample(g0, t), sample(g1, t)
        assert np.array_equal(a.l_l, b.l_l) and np.array_equal(a.l_r, b.l_r)


def test_circular_constant_split():
    gait = build_gait(GaitConfig(kind="circular", delta=0.01), ROBOT)
    rng = np.random.RandomState(1)
    for t in rng.uniform(0, 12, 200):
        s = sample(gait, t)
        assert np.allclose(s.l_r - s.l_l, 0.01, atol=1e-15)
        assert np.all(s.l_l >= 0.08 - 1e-12) and np.all(s.l_r <= 0.12 + 1e-12)


def test_sidewinding_split_alternates():
    gait = build_gait(GaitConfig(kind="sidewinding", delta=0.01), ROBOT)
    s0 = sample(gait, 0.05 * 6.0)          # inside first half of segment 1 phase
    assert s0.l_r[0] - s0.l_l[0] == pytest.approx(0.01, abs=1e-15)
    s1 = sample(gait, 0.7 * 6.0)           # second half
    assert s1.l_r[0] - s1.l_l[0] == pytest.approx(-0.01, abs=1e-15)


def test_smoothstep_midpoint_and_derivatives():
    w, wp, wpp = smoothstep(0.5)
    assert w == pytest.approx(0.5) and wp == pytest.approx(1.875)
    assert wpp == pytest.approx(0.0, abs=1e-15)
    w, wp, wpp = smoothstep(np.array([0.0, 1.0]))
    assert np.all(w == [0.0, 1.0]) and np.all(wp == 0.0) and np.all(wpp == 0.0)


def test_periodicity_bit_exact_at_representable_times():
    gait = build_gait(GaitConfig(), ROBOT)
    for t in (0.25, 1.5, 2.75, 5.0):
        a = sample(gait, t)
        b = sample(gait, t + 6.0)    # exactly representable sum
        for f in ("l_l", "l_r", "dl_l", "dl_r", "ddl_l", "ddl_r"):
            assert np.array_equal(getattr(a, f), getattr(b, f))


def test_periodicity_generic_times():
    gait = build_gait(GaitConfig(), ROBOT)
    a, b = sample(gait, 0.3), sample(gait, 6.3)
    assert np.allclose(a.l_l, b.l_l, atol=1e-12)


def test_c2_continuity_by_finite_differences():
    gait = build_gait(GaitConfig(kind="sidewinding"), ROBOT)
    rng = np.random.RandomState(2)
    h = 1e-6 * gait.period
    knots = gait.knot_times()
    checked = 0
    while checked < 300:
        t = rng.uniform(0.0, gait.period)
        if any(abs(t - k) < 3 * h for k in knots):
            continue
        sm, s0, sp = sample(gait, t - h), sample(gait, t), sample(gait, t + h)
        fd1 = (sp.l_l - sm.l_l) / (2 * h)
        fd2 = (sp.l_l - 2 * s0.l_l + sm.l_l) / h**2
        assert np.allclose(fd1, s0.dl_l, rtol=1e-5, atol=1e-7)
        assert np.allclose(fd2, s0.ddl_l, rtol=1e-3, atol=1e-3)
        checked += 1


def test_no_ddl_jump_at_knots():
    gait = build_gait(GaitConfig(), ROBOT)
    eps = 1e-9 * gait.period
    for k in gait.knot_times():
        before, after = sample(gait, k - eps), sample(gait, k + eps)
        assert np.allclose(before.ddl_l, after.ddl_l, atol=1e-5)


def test_shape_integral_zero_over_period():
    # periodic midline: the rate integrates to zero over one cycle
    gait = build_gait(GaitConfig(kind="sidewinding"), ROBOT)
    ts = np.linspace(0.0, gait.period, 6001)
    rates = np.array([sample(gait, t).dl_l for t in ts])
    integral = np.trapezoid(rates, ts, axis=0)
    assert np.max(np.abs(integral)) < 1e-8


def test_anchor_schedule_lookup():
    cfg = GaitConfig(anchor_schedule=((0.0, 0.5, 7), (0.5, 1.0, 1)))
    gait = build_gait(cfg, ROBOT)
    assert anchor_at(gait, 0.25 * 6.0) == 7
    assert anchor_at(gait, 0.75 * 6.0) == 1
    assert anchor_at(gait, 6.0 + 0.25 * 6.0) == 7


def test_anchor_rule_most_contracted():
    gait = build_gait(GaitConfig(), ROBOT)
    # segment 3 (offset 2/6) is deepest at t = (2/6 + duty/4) * T ... probe
    # directly: find the time where segment 3 is the unique argmin
    t = (2.0 / 6.0 + gait.config.duty / 4.0) * 6.0
    lbar = sample(gait, t).lbar
    assert int(np.argmin(lbar)) == 2
    assert anchor_at(gait, t) == 4


def test_anchor_tie_breaks_to_head():
    gait = build_gait(GaitConfig(l_min=0.1, l_max=0.1), ROBOT)
    assert anchor_at(gait, 1.23) == 2


def test_rejects_bad_configs():
    with pytest.raises(GaitError):
        build_gait(GaitConfig(l_min=0.0), ROBOT)
    with pytest.raises(GaitError):
        build_gait(GaitConfig(l_min=0.12, l_max=0.08), ROBOT)
    with pytest.raises(GaitError):
        build_gait(GaitConfig(duty=1.0), ROBOT)
    with pytest.raises(GaitError):
        build_gait(GaitConfig(kind="circular", delta=0.17), ROBOT)
    with pytest.raises(GaitError):
        build_gait(GaitConfig(kind="circular", delta=0.05), ROBOT)  # > l_max-l_min
    with pytest.raises(GaitError):
        build_gait(GaitConfig(kind="spiral"), ROBOT)
    with pytest.raises(GaitError):
        build_gait(GaitConfig(phase_offsets=(0.0, 0.5)), ROBOT)


def test_rejects_bad_waypoints():
    wp_good = [[[0.0, 0.12], [0.5, 0.08]]] * 2
    cfg = GaitConfig(kind="custom", waypoints=tuple((tuple(wp_good[0]),) * 2))
    # non-monotone fractions
    bad = ((((0.5, 0.1), (0.2, 0.11)), ((0.0, 0.1),)),)
    with pytest.raises(GaitError, match="increasing"):
        build_gait(GaitConfig(kind="custom", waypoints=bad), RobotParams(n=1))
    # length above l_max
    bad = ((((0.0, 0.2),), ((0.0, 0.1),)),)
    with pytest.raises(GaitError, match="l_min"):
        build_gait(GaitConfig(kind="custom", waypoints=bad), RobotParams(n=1))


def test_custom_waypoint_interpolation():
    knots = ((0.0, 0.12), (0.5, 0.08))
    cfg = GaitConfig(kind="custom", waypoints=(((knots), (knots)),), period=1.0)
    gait = build_gait(cfg, RobotParams(n=1))
    s = sample(gait, 0.0)
    assert s.l_l[0] == pytest.approx(0.12)
    s = sample(gait, 0.5)
    assert s.l_l[0] == pytest.approx(0.08)
    s = sample(gait, 0.25)   # halfway down the smoothstep
    assert s.l_l[0] == pytest.approx(0.10)
    s = sample(gait, 0.75)   # halfway back up through the wrap interval
    assert s.l_l[0] == pytest.approx(0.10)
