"""Shared test utilities: random inputs and smooth synthetic trajectories."""

import math

import numpy as np

from wormsim import body_headings, link_vectors, segment_shape
from wormsim.geometry import _cum0


def random_actuation(rng, n, r=0.1):
    """Valid random per-segment actuation arrays (lengths, rates, accels)."""
    ll = rng.uniform(0.07, 0.13, n)
    lr = np.clip(ll + rng.uniform(-0.6, 0.6, n) * r, 0.03, None)
    dll = rng.uniform(-0.15, 0.15, n)
    dlr = rng.uniform(-0.15, 0.15, n)
    ddll = rng.uniform(-1.5, 1.5, n)
    ddlr = rng.uniform(-1.5, 1.5, n)
    return ll, lr, dll, dlr, ddll, ddlr


def random_state(rng):
    return np.array([
        rng.uniform(-1.0, 1.0),
        rng.uniform(-1.0, 1.0),
        rng.uniform(-np.pi, np.pi),
        rng.uniform(-0.3, 0.3),
        rng.uniform(-0.3, 0.3),
        rng.uniform(-1.0, 1.0),
    ])


def fourier(rng, base, amp, nharm, w0):
    """Random C-infinity signal with harmonic magnitudes bounded away from 0."""
    mag = rng.uniform(0.35, 1.0, (nharm, 2)) * amp / nharm
    coef = mag * rng.choice([-1.0, 1.0], (nharm, 2))

    def f(t):
        v, dv, ddv = base, 0.0, 0.0
        for k in range(nharm):
            w = w0 * (k + 1)
            a, b = coef[k]
            v = v + a * math.sin(w * t) + b * math.cos(w * t)
            dv = dv + a * w * math.cos(w * t) - b * w * math.sin(w * t)
            ddv = ddv - a * w * w * math.sin(w * t) - b * w * w * math.cos(w * t)
        return v, dv, ddv

    return f


def smooth_trajectory(rng, n, r=0.1):
    """Random smooth actuator trajectory plus head heading history.

    Returns (states, link_positions): states(t) gives the raw actuation
    arrays and (theta1, omega1, alpha1); link_positions(t) evaluates the
    link vectors from positions only, for finite differencing.
    """
    lfun = [(fourier(rng, 0.1, 0.012, 2, 4.1), fourier(rng, 0.1, 0.012, 2, 3.3))
            for _ in range(n)]
    thfun = fourier(rng, rng.uniform(-1.0, 1.0), 1.2, 2, 8.0)

    def states(t):
        ll, lr, dll, dlr, ddll, ddlr = (np.empty(n) for _ in range(6))
        for i, (fl, fr) in enumerate(lfun):
            ll[i], dll[i], ddll[i] = fl(t)
            lr[i], dlr[i], ddlr[i] = fr(t)
        th1, om1, al1 = thfun(t)
        return (ll, lr, dll, dlr, ddll, ddlr), th1, om1, al1

    def link_positions(t):
        ls, th1, _, _ = states(t)
        s = segment_shape(*ls, r)
        theta = body_headings(th1, s.phi)
        beta = theta[:-1] - 0.5 * s.phi
        return s.lbar * np.cos(beta), s.lbar * np.sin(beta)

    return states, link_positions


def analytic_links(states, t, r=0.1):
    """Shape and link vectors (with derivative data) at time t."""
    ls, th1, om1, al1 = states(t)
    s = segment_shape(*ls, r)
    theta = body_headings(th1, s.phi)
    dtheta = om1 - _cum0(s.dphi)
    return s, link_vectors(theta, dtheta, s), al1
