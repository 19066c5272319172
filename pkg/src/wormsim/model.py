"""Robot parameterization and the constant incidence/distribution matrices.

The robot is a chain of n+1 rigid plates joined by n independently actuated
segments. Everything downstream (geometry, friction, dynamics) is expressed
in terms of the parameters and operator matrices defined here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FrictionParams",
    "RobotParams",
    "Operators",
    "build_operators",
    "angle_diagonals",
    "validate_params",
]


@dataclass(frozen=True)
class FrictionParams:
    """Anisotropic Coulomb coefficients plus the sign-smoothing scale.

    xi_forward applies when a plate slides along its own +x axis,
    xi_backward against it, xi_normal sideways. smoothing_eps [m/s] is the
    velocity scale of the tanh that replaces the hard sign function.
    """

    xi_forward: float = 0.2
    xi_backward: float = 0.8
    xi_normal: float = 0.6
    smoothing_eps: float = 1e-3


@dataclass(frozen=True)
class RobotParams:
    """Physical description of the plate chain.

    n      number of segments (the chain has n+1 plates)
    r      plate width [m]; actuator lines attach at +-r/2 off center
    m      plate mass [kg]
    J      plate moment of inertia about its own center of mass [kg m^2]
    g      gravitational acceleration [m/s^2]
    """

    n: int = 6
    r: float = 0.1
    m: float = 0.1
    J: float = 8.33e-5
    g: float = 9.81
    friction: FrictionParams = field(default_factory=FrictionParams)


def validate_params(params: RobotParams) -> RobotParams:
    """Check all invariants, returning the params unchanged when they hold.

    Raises ValueError naming the offending field. A forward coefficient
    larger than the backward one is legal but almost certainly a mistake
    (the bristles are supposed to grip when dragged backward), so that case
    only warns.
    """
    if not isinstance(params.n, (int, np.integer)) or params.n < 1:
        raise ValueError(f"n must be an integer >= 1, got {params.n!r}")
    for name in ("r", "m", "J", "g"):
        v = getattr(params, name)
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"{name} must be finite and > 0, got {v!r}")
    fr = params.friction
    for name in ("xi_forward", "xi_backward", "xi_normal"):
        v = getattr(fr, name)
        if not math.isfinite(v) or v < 0.0:
            raise ValueError(f"friction.{name} must be finite and >= 0, got {v!r}")
    if not math.isfinite(fr.smoothing_eps) or fr.smoothing_eps <= 0.0:
        raise ValueError(
            f"friction.smoothing_eps must be finite and > 0, got {fr.smoothing_eps!r}"
        )
    if fr.xi_forward > fr.xi_backward:
        warnings.warn(
            "xi_forward > xi_backward: bristles will grip forward motion "
            "and slip backward, the reverse of the usual setup",
            stacklevel=2,
        )
    return params


@dataclass(frozen=True)
class Operators:
    """Constant integer matrices coupling plate and segment quantities.

    D1 (n x n+1)   chain difference: D1 @ X gives the link components L_x.
    D2 (n+1 x 2n)  distributes the 2n actuator force components (left/right
                   interleaved per segment) onto the plates they push.
    D3 (n+1 x 2n)  same layout but with the left/right sign pattern that
                   produces the torque about each plate center.
    e  (n+1,)      all ones; e @ D2 == 0 expresses internal-force cancellation.
    """

    n: int
    D1: np.ndarray
    D2: np.ndarray
    D3: np.ndarray
    e: np.ndarray


def build_operators(n: int) -> Operators:
    """Build the operator set for an n-segment chain.

    D1 row i is +1 at plate i, -1 at plate i+1, so that D1 @ X equals the
    head-to-tail link components (plate i sits ahead of plate i+1).
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"segment count must be an integer >= 1, got {n!r}")
    n = int(n)
    D1 = np.zeros((n, n + 1), dtype=np.int64)
    D2 = np.zeros((n + 1, 2 * n), dtype=np.int64)
    D3 = np.zeros((n + 1, 2 * n), dtype=np.int64)
    for i in range(n):
        D1[i, i] = 1
        D1[i, i + 1] = -1
    for b in range(n + 1):
        if b >= 1:  # segment b-1 pulls plate b forward
            D2[b, 2 * (b - 1)] = 1
            D2[b, 2 * (b - 1) + 1] = 1
            D3[b, 2 * (b - 1)] = -1
            D3[b, 2 * (b - 1) + 1] = 1
        if b <= n - 1:  # segment b pulls plate b backward
            D2[b, 2 * b] = -1
            D2[b, 2 * b + 1] = -1
            D3[b, 2 * b] = 1
            D3[b, 2 * b + 1] = -1
    D1.setflags(write=False)
    D2.setflags(write=False)
    D3.setflags(write=False)
    e = np.ones(n + 1, dtype=np.int64)
    e.setflags(write=False)
    return Operators(n=n, D1=D1, D2=D2, D3=D3, e=e)


def angle_diagonals(theta):
    """Diagonal cosine/sine matrices of the plate headings.

    Returns (C, S), both (n+1) x (n+1), with C[i, i] = cos(theta_i) and
    S[i, i] = sin(theta_i).
    """
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1:
        raise ValueError("theta must be a 1-d sequence of headings")
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    return np.diag(np.cos(theta)), np.diag(np.sin(theta))
