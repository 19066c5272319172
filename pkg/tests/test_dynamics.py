import math

import numpy as np
import pytest

from helpers import random_actuation, random_state
from oracles import two_body_accelerations
from wormsim import (
    DynamicsError,
    FrictionParams,
    HeadState,
    RobotParams,
    build_operators,
    head_acceleration_paper,
    head_acceleration_projection,
    internal_forces,
    reconstruct_bodies,
)
from wormsim.dynamics import make_derivative
from wormsim.gait import ActuationSample

P = RobotParams()
P0 = RobotParams(friction=FrictionParams(0.0, 0.0, 0.0, 1e-3))


def sample_of(*arrays):
    return ActuationSample(*(np.asarray(a, dtype=float) for a in arrays))


def static_sample(ll, lr):
    n = len(ll)
    z = np.zeros(n)
    return sample_of(ll, lr, z, z, z, z)


class _FixedActuation:
    """Constant-in-time actuation exposing the integrator fast path."""

    def __init__(self, sample, period=1.0):
        self._arrays = (sample.l_l, sample.l_r, sample.dl_l, sample.dl_r,
                        sample.ddl_l, sample.ddl_r)
        self.period = period
        self.n = len(sample.l_l)

    def sample_arrays(self, t):
        return self._arrays


def test_static_straight_equilibrium():
    s = static_sample([0.1, 0.1, 0.1], [0.1, 0.1, 0.1])
    p = RobotParams(n=3)
    for fn in (head_acceleration_paper, head_acceleration_projection):
        a = fn(HeadState(), s, p)
        assert a.ax1 == 0.0 and a.ay1 == 0.0 and a.alpha1 == 0.0


def test_two_body_frictionless_contraction():
    # symmetric contraction: the mass center stays put, so the head picks up
    # half of the midline acceleration
    n1 = RobotParams(n=1, friction=FrictionParams(0.0, 0.0, 0.0, 1e-3))
    s = sample_of([0.1], [0.1], [0.0], [0.0], [0.5], [0.5])
    a = head_acceleration_paper(HeadState(), s, n1)
    assert a.ax1 == pytest.approx(0.25, abs=1e-14)
    assert a.ay1 == 0.0 and a.alpha1 == 0.0
    a = head_acceleration_projection(HeadState(), s, n1)
    assert a.ax1 == pytest.approx(0.25, abs=1e-14)
    assert a.ay1 == pytest.approx(0.0, abs=1e-15)
    assert a.alpha1 == pytest.approx(0.0, abs=1e-15)


def test_two_segment_bend_closure():
    # equal bend accelerations on both segments: alpha1 = (2 a + a)/3
    p = RobotParams(n=2, friction=FrictionParams(0.0, 0.0, 0.0, 1e-3))
    r = p.r
    dd = 0.3 * r  # ddphi = (ddl_r - ddl_l)/r at straight shape
    s = sample_of([0.1, 0.1], [0.1, 0.1], [0.0] * 2, [0.0] * 2,
                  [-dd / 2] * 2, [dd / 2] * 2)
    a = head_acceleration_paper(HeadState(), s, p)
    assert a.alpha1 == pytest.approx(0.3, abs=1e-14)


def test_reconstruct_bodies_examples():
    n1 = RobotParams(n=1)
    s = static_sample([0.1], [0.1])
    b = reconstruct_bodies(HeadState(), s, n1)
    assert b.x == pytest.approx([0.0, -0.1]) and b.y == pytest.approx([0.0, 0.0])
    b = reconstruct_bodies(HeadState(theta1=math.pi / 2), s, n1)
    assert b.x == pytest.approx([0.0, 0.0], abs=1e-15)
    assert b.y == pytest.approx([0.0, -0.1])


def test_reconstruct_chain_consistent():
    rng = np.random.RandomState(8)
    ops = build_operators(6)
    for _ in range(20):
        s = sample_of(*random_actuation(rng, 6))
        st = HeadState.from_array(random_state(rng))
        b = reconstruct_bodies(st, s, P)
        shape_lx = -(np.diff(b.x))
        assert np.allclose(ops.D1 @ b.x, shape_lx, atol=1e-15)


def test_internal_forces_minimum_norm_hand_case():
    # single segment, unit link acceleration, no friction:
    # (D1 D2) H = [-2 -2] H = m * 1 has minimum-norm solution -m/4 each
    ops = build_operators(1)
    n1 = RobotParams(n=1)
    f = internal_forces((np.array([1.0]), np.array([0.0])),
                        (np.zeros(2), np.zeros(2)), ops, n1)
    assert f.Hx == pytest.approx([-0.025, -0.025], abs=1e-15)
    assert f.Hy == pytest.approx([0.0, 0.0], abs=1e-15)
    assert f.residual <= 1e-15


def test_internal_forces_zero_rhs():
    ops = build_operators(3)
    p = RobotParams(n=3)
    f = internal_forces((np.zeros(3), np.zeros(3)),
                        (np.zeros(4), np.zeros(4)), ops, p)
    assert np.all(f.Hx == 0.0) and np.all(f.Hy == 0.0) and f.residual == 0.0


def test_internal_forces_pair_equality_random():
    rng = np.random.RandomState(9)
    ops = build_operators(2)
    p = RobotParams(n=2)
    for _ in range(10):
        ddL = (rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2))
        fr = (rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3))
        f = internal_forces(ddL, fr, ops, p)
        assert np.allclose(f.Hx[0::2], f.Hx[1::2], atol=1e-13)
        assert np.allclose(f.Hy[0::2], f.Hy[1::2], atol=1e-13)


def test_internal_forces_dimension_mismatch():
    ops = build_operators(2)
    with pytest.raises(DynamicsError, match="dimension"):
        internal_forces((np.zeros(3), np.zeros(3)), (np.zeros(3), np.zeros(3)),
                        ops, RobotParams(n=2))


def test_torque_bracket_vanishes_on_random_states():
    rng = np.random.RandomState(10)
    for _ in range(100):
        s = sample_of(*random_actuation(rng, 6))
        st = HeadState.from_array(random_state(rng))
        _, diag = head_acceleration_paper(st, s, P, diagnostics=True)
        assert abs(diag.torque_bracket) <= 1e-10
        assert diag.forces.residual <= 1e-12


def test_kernel_matches_reference_implementations():
    rng = np.random.RandomState(12)
    for n in (1, 2, 6):
        p = RobotParams(n=n)
        for _ in range(40):
            s = sample_of(*random_actuation(rng, n))
            y = random_state(rng)
            st = HeadState.from_array(y)
            f_paper = make_derivative(p, _FixedActuation(s), "paper")
            f_proj = make_derivative(p, _FixedActuation(s), "projection")
            ref = head_acceleration_paper(st, s, p)
            got = f_paper(0.0, y)
            assert np.allclose(got[3:], [ref.ax1, ref.ay1, ref.alpha1],
                               rtol=1e-12, atol=1e-13)
            assert np.array_equal(got[:3], y[3:])
            ref = head_acceleration_projection(st, s, p)
            got = f_proj(0.0, y)
            assert np.allclose(got[3:], [ref.ax1, ref.ay1, ref.alpha1],
                               rtol=1e-9, atol=1e-11)


def test_two_body_oracle_agrees_with_both_modes():
    rng = np.random.RandomState(13)
    n1 = RobotParams(n=1)
    fr = n1.friction
    for _ in range(100):
        arr = [a[0] for a in random_actuation(rng, 1)]
        y = random_state(rng)
        paper, proj = two_body_accelerations(
            tuple(y), tuple(arr), n1.r, n1.m, n1.J, n1.g,
            fr.xi_forward, fr.xi_backward, fr.xi_normal, fr.smoothing_eps)
        s = sample_of(*[[v] for v in arr])
        st = HeadState.from_array(y)
        a = head_acceleration_paper(st, s, n1)
        assert np.allclose([a.ax1, a.ay1, a.alpha1], paper, atol=1e-10)
        a = head_acceleration_projection(st, s, n1)
        assert np.allclose([a.ax1, a.ay1, a.alpha1], proj, atol=1e-10)


def test_modes_agree_on_straight_symmetric_motion():
    # straight chain moving along its own axis: closures must coincide
    rng = np.random.RandomState(14)
    for _ in range(20):
        ll = rng.uniform(0.08, 0.12, 4)
        dl = rng.uniform(-0.1, 0.1, 4)
        ddl = rng.uniform(-1, 1, 4)
        s = sample_of(ll, ll, dl, dl, ddl, ddl)
        p = RobotParams(n=4)
        st = HeadState(vx1=rng.uniform(-0.2, 0.2))
        a1 = head_acceleration_paper(st, s, p)
        a2 = head_acceleration_projection(st, s, p)
        assert a1.ax1 == pytest.approx(a2.ax1, abs=1e-12)
        assert a1.ay1 == 0.0 and a2.ay1 == pytest.approx(0.0, abs=1e-15)
        assert a1.alpha1 == 0.0 and a2.alpha1 == pytest.approx(0.0, abs=1e-15)
