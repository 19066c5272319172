"""Reduced equations of motion for the head state (x1, y1, theta1).

With the segment shapes prescribed, the only free coordinates are the head
pose and its rates. Two closures are provided:

paper mode
    Momentum balance gives the translational accelerations once the head
    angular acceleration alpha1 is known. The torque balance, after the
    internal actuator forces are recovered through a minimum-norm solve,
    loses its force term entirely: the minimum-norm solution splits every
    segment's force equally between the left and right actuator lines, and
    the torque distribution matrix D3 annihilates exactly those splits. The
    closure therefore degenerates to alpha1 = sum_i sum_{j<i} ddphi_j/(n+1),
    a pure shape statement that ignores friction coupling into heading. The
    annihilated torque term can still be evaluated as a diagnostic; it must
    come back at rounding level.

projection mode
    Exact reduced dynamics by d'Alembert projection: body accelerations
    decompose as T qdd + a0 with q = (x1, y1, theta1) and T the Jacobian of
    body coordinates with respect to q; solving the 3x3 SPD system
    T' M T qdd = T' (F - M a0) keeps the friction-to-heading coupling the
    paper-mode closure discards. Internal actuator forces act along the
    lines joining their attachment points, so they drop out of the
    projection.

The two modes coincide on left/right-symmetric actuation and differ on
turning gaits; both are exposed so the difference is observable rather than
assumed away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._jit import njit
from .errors import DynamicsError, GeometryError
from .geometry import (
    BodyStates,
    _cum0,
    body_headings,
    body_positions,
    body_velocities,
    link_vectors,
    segment_shape,
)
from .friction import assemble_friction
from .model import Operators, RobotParams, build_operators

__all__ = [
    "HeadState",
    "Accel",
    "InternalForces",
    "MODES",
    "reconstruct_bodies",
    "internal_forces",
    "head_acceleration_paper",
    "head_acceleration_projection",
    "head_acceleration",
    "make_derivative",
]

MODES = ("paper", "projection")

# residual above this (scaled) level means the force system was assembled wrong
_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class HeadState:
    """Reduced dynamic state: head pose, head rates, and time."""

    x1: float = 0.0
    y1: float = 0.0
    theta1: float = 0.0
    vx1: float = 0.0
    vy1: float = 0.0
    omega1: float = 0.0
    t: float = 0.0

    def as_array(self):
        return np.array([self.x1, self.y1, self.theta1, self.vx1, self.vy1, self.omega1])

    @classmethod
    def from_array(cls, y, t=0.0):
        return cls(x1=y[0], y1=y[1], theta1=y[2], vx1=y[3], vy1=y[4], omega1=y[5], t=t)


@dataclass(frozen=True)
class Accel:
    ax1: float
    ay1: float
    alpha1: float


@dataclass(frozen=True)
class InternalForces:
    """Actuator force components (left/right interleaved) and solve residual."""

    Hx: np.ndarray
    Hy: np.ndarray
    residual: float


@dataclass(frozen=True)
class PaperDiagnostics:
    """Evaluated torque bracket and recovered internal forces (paper mode)."""

    torque_bracket: float
    forces: InternalForces


@lru_cache(maxsize=8)
def _ops(n: int) -> Operators:
    return build_operators(n)


def _kinematics(state: HeadState, sample, params: RobotParams):
    shape = segment_shape(
        sample.l_l, sample.l_r, sample.dl_l, sample.dl_r, sample.ddl_l, sample.ddl_r,
        params.r,
    )
    theta = body_headings(state.theta1, shape.phi)
    dtheta = state.omega1 - _cum0(shape.dphi)
    links = link_vectors(theta, dtheta, shape)
    x, y = body_positions((state.x1, state.y1), links)
    vx, vy, omega = body_velocities((state.vx1, state.vy1, state.omega1), links, shape)
    bodies = BodyStates(x=x, y=y, theta=theta, vx=vx, vy=vy, omega=omega)
    return shape, links, bodies


def reconstruct_bodies(state: HeadState, sample, params: RobotParams) -> BodyStates:
    """Full plate poses and velocities implied by a head state and a shape sample."""
    return _kinematics(state, sample, params)[2]


def internal_forces(ddL, friction_forces, ops: Operators, params: RobotParams) -> InternalForces:
    """Recover the actuator force components from the per-plate force balance.

    ddL is the pair of fully evaluated link acceleration arrays. The chain
    difference of the plate force balance reads (D1 D2) H = m ddL - D1 f;
    D1 D2 is n x 2n with duplicated column pairs, so the system is solved in
    the least-squares minimum-norm sense, which distributes each segment's
    force equally between its left and right lines. The system is consistent
    by construction; a residual above tolerance means the inputs do not come
    from the same state and sample.
    """
    ddLx, ddLy = np.asarray(ddL[0], float), np.asarray(ddL[1], float)
    fx, fy = np.asarray(friction_forces[0], float), np.asarray(friction_forces[1], float)
    n = ops.n
    if len(ddLx) != n or len(fx) != n + 1:
        raise DynamicsError(
            f"dimension mismatch: expected {n} links and {n + 1} forces, "
            f"got {len(ddLx)} and {len(fx)}"
        )
    A = (ops.D1 @ ops.D2).astype(float)
    bx = params.m * ddLx - ops.D1 @ fx
    by = params.m * ddLy - ops.D1 @ fy
    Hx, *_ = np.linalg.lstsq(A, bx, rcond=None)
    Hy, *_ = np.linalg.lstsq(A, by, rcond=None)
    residual = max(np.linalg.norm(A @ Hx - bx), np.linalg.norm(A @ Hy - by))
    scale = 1.0 + max(np.linalg.norm(bx), np.linalg.norm(by))
    if residual > _RESIDUAL_TOL * scale:
        raise DynamicsError(
            f"internal force system inconsistent (residual {residual:.3e})"
        )
    return InternalForces(Hx=Hx, Hy=Hy, residual=residual)


def _wsum(a):
    """sum_i sum_{j<i} a_j over the n+1 plates, i.e. weights n, n-1, ..., 1."""
    n = len(a)
    return np.arange(n, 0, -1) @ a


def head_acceleration_paper(state: HeadState, sample, params: RobotParams,
                            diagnostics: bool = False):
    """Head acceleration under the paper-literal closure.

    With diagnostics=True also returns the evaluated torque bracket and the
    recovered internal forces (a minimum-norm solve per call, so off by
    default in integration loops).
    """
    shape, links, bodies = _kinematics(state, sample, params)
    fx, fy = assemble_friction(bodies, params)
    n = shape.n
    alpha1 = _wsum(shape.ddphi) / (n + 1)
    ddLx, ddLy = links.ddL(alpha1)
    ax1 = (fx.sum() / params.m + _wsum(ddLx)) / (n + 1)
    ay1 = (fy.sum() / params.m + _wsum(ddLy)) / (n + 1)
    if not (math.isfinite(ax1) and math.isfinite(ay1) and math.isfinite(alpha1)):
        raise DynamicsError("non-finite acceleration in paper-mode closure")
    accel = Accel(ax1=ax1, ay1=ay1, alpha1=alpha1)
    if not diagnostics:
        return accel
    ops = _ops(n)
    forces = internal_forces((ddLx, ddLy), (fx, fy), ops, params)
    bracket = 0.5 * params.r * (
        np.cos(bodies.theta) @ (ops.D3 @ forces.Hx)
        + np.sin(bodies.theta) @ (ops.D3 @ forces.Hy)
    )
    return accel, PaperDiagnostics(torque_bracket=bracket, forces=forces)


def head_acceleration_projection(state: HeadState, sample, params: RobotParams) -> Accel:
    """Head acceleration by d'Alembert projection onto (x1, y1, theta1)."""
    shape, links, bodies = _kinematics(state, sample, params)
    fx, fy = assemble_friction(bodies, params)
    n = shape.n
    nb = n + 1
    m, J = params.m, params.J
    # Jacobian columns for theta1: dx_i/dtheta1 = -sum_{j<i} Bx_j, same for y
    Px = -_cum0(links.Bx)
    Py = -_cum0(links.By)
    # prescribed-shape part of the body accelerations (alpha1 = 0)
    cAx = _cum0(links.Ax)
    cAy = _cum0(links.Ay)
    cdd = _cum0(shape.ddphi)
    M3 = np.array([
        [nb * m, 0.0, m * Px.sum()],
        [0.0, nb * m, m * Py.sum()],
        [m * Px.sum(), m * Py.sum(), m * (Px @ Px + Py @ Py) + nb * J],
    ])
    rhs = np.array([
        fx.sum() + m * cAx.sum(),
        fy.sum() + m * cAy.sum(),
        Px @ (fx + m * cAx) + Py @ (fy + m * cAy) + J * cdd.sum(),
    ])
    try:
        np.linalg.cholesky(M3)
    except np.linalg.LinAlgError:
        raise DynamicsError("projected mass matrix is not positive definite") from None
    q = np.linalg.solve(M3, rhs)
    if not np.all(np.isfinite(q)):
        raise DynamicsError("non-finite acceleration in projection closure")
    return Accel(ax1=q[0], ay1=q[1], alpha1=q[2])


def head_acceleration(state: HeadState, sample, params: RobotParams, mode: str) -> Accel:
    if mode == "paper":
        return head_acceleration_paper(state, sample, params)
    if mode == "projection":
        return head_acceleration_projection(state, sample, params)
    raise ValueError(f"unknown dynamics mode {mode!r}")


# ---------------------------------------------------------------------------
# fused kernel used by the integrator (same math as above, loop form)

_STATUS_MESSAGES = {
    1: "actuator lengths cannot close the segment trapezoid",
    2: "projected mass matrix is not positive definite",
    3: "non-finite acceleration",
}


@njit(cache=True)
def _rhs_kernel(mode, y, ll, lr, dll, dlr, ddll, ddlr,
                r, m, J, g, xi_p, xi_m, xi_n, eps, out):  # pragma: no cover
    n = ll.shape[0]
    th1 = y[2]
    vx1 = y[3]
    vy1 = y[4]
    om1 = y[5]
    mg = m * g

    phi = np.empty(n)
    dphi = np.empty(n)
    ddphi = np.empty(n)
    lb = np.empty(n)
    dlb = np.empty(n)
    ddlb = np.empty(n)
    for i in range(n):
        if ll[i] <= 0.0 or lr[i] <= 0.0:
            return 1
        d = (lr[i] - ll[i]) / (2.0 * r)
        if d <= -1.0 or d >= 1.0:
            return 1
        ph = 2.0 * math.asin(d)
        half = 0.5 * ph
        c = math.cos(half)
        dp = (dlr[i] - dll[i]) / (r * c)
        phi[i] = ph
        dphi[i] = dp
        ddphi[i] = (ddlr[i] - ddll[i]) / (r * c) + 0.5 * dp * dp * math.tan(half)
        lb[i] = 0.5 * (ll[i] + lr[i])
        dlb[i] = 0.5 * (dll[i] + dlr[i])
        ddlb[i] = 0.5 * (ddll[i] + ddlr[i])

    wsum_ddphi = 0.0
    for j in range(n):
        wsum_ddphi += (n - j) * ddphi[j]

    # running sums over segments j < k while walking the plates
    cphi = 0.0
    cdphi = 0.0
    cddphi = 0.0
    cdLx = 0.0
    cdLy = 0.0
    cAx = 0.0
    cAy = 0.0
    cBx = 0.0
    cBy = 0.0
    Sfx = 0.0
    Sfy = 0.0
    SPx = 0.0
    SPy = 0.0
    SPP = 0.0
    R3 = 0.0
    SwAx = 0.0
    SwAy = 0.0
    SwBx = 0.0
    SwBy = 0.0

    for k in range(n + 1):
        thk = th1 - cphi
        vxk = vx1 - cdLx
        vyk = vy1 - cdLy
        ct = math.cos(thk)
        st = math.sin(thk)
        vt = vxk * ct + vyk * st
        vn = -vxk * st + vyk * ct
        if vt > 0.0:
            xi_t = xi_p
        else:
            xi_t = xi_m
        ft = -mg * xi_t * math.tanh(vt / eps)
        fn = -mg * xi_n * math.tanh(vn / eps)
        fxk = ct * ft - st * fn
        fyk = st * ft + ct * fn
        Sfx += fxk
        Sfy += fyk
        Pxk = -cBx
        Pyk = -cBy
        SPx += Pxk
        SPy += Pyk
        SPP += Pxk * Pxk + Pyk * Pyk
        R3 += Pxk * (fxk + m * cAx) + Pyk * (fyk + m * cAy) + J * cddphi
        SwAx += cAx
        SwAy += cAy
        SwBx += cBx
        SwBy += cBy

        if k < n:
            beta = thk - 0.5 * phi[k]
            dbeta = (om1 - cdphi) - 0.5 * dphi[k]
            b0 = -cddphi - 0.5 * ddphi[k]
            cb = math.cos(beta)
            sb = math.sin(beta)
            L = lb[k]
            dL = dlb[k]
            cdLx += dL * cb - L * sb * dbeta
            cdLy += dL * sb + L * cb * dbeta
            cAx += ddlb[k] * cb - 2.0 * dL * dbeta * sb - L * dbeta * dbeta * cb - L * sb * b0
            cAy += ddlb[k] * sb + 2.0 * dL * dbeta * cb - L * dbeta * dbeta * sb + L * cb * b0
            cBx += -L * sb
            cBy += L * cb
            cphi += phi[k]
            cdphi += dphi[k]
            cddphi += ddphi[k]

    nb = float(n + 1)
    if mode == 0:
        al1 = wsum_ddphi / nb
        ax1 = (Sfx / m + SwAx + SwBx * al1) / nb
        ay1 = (Sfy / m + SwAy + SwBy * al1) / nb
    else:
        a11 = nb * m
        a13 = m * SPx
        a23 = m * SPy
        a33 = m * SPP + nb * J
        det = a11 * (a11 * a33 - a23 * a23) - a11 * a13 * a13
        if det <= 0.0:
            return 2
        r1 = Sfx + m * SwAx
        r2 = Sfy + m * SwAy
        ax1 = (r1 * (a11 * a33 - a23 * a23) + a13 * (a23 * r2 - a11 * R3)) / det
        ay1 = (r2 * (a11 * a33 - a13 * a13) + a23 * (a13 * r1 - a11 * R3)) / det
        al1 = a11 * (a11 * R3 - a13 * r1 - a23 * r2) / det
    if not (math.isfinite(ax1) and math.isfinite(ay1) and math.isfinite(al1)):
        return 3
    out[0] = y[3]
    out[1] = y[4]
    out[2] = y[5]
    out[3] = ax1
    out[4] = ay1
    out[5] = al1
    return 0


def make_derivative(params: RobotParams, actuation, mode: str):
    """Build the state-derivative callable f(t, y) used by the integrator.

    actuation must provide sample_arrays(t) returning the six per-segment
    length/derivative arrays. The callable works on the packed state vector
    [x1, y1, theta1, vx1, vy1, omega1].
    """
    if mode not in MODES:
        raise ValueError(f"unknown dynamics mode {mode!r}")
    mode_id = MODES.index(mode)
    fr = params.friction
    args = (params.r, params.m, params.J, params.g,
            fr.xi_forward, fr.xi_backward, fr.xi_normal, fr.smoothing_eps)
    sample_arrays = actuation.sample_arrays

    def derivative(t, y):
        out = np.empty(6)
        status = _rhs_kernel(mode_id, y, *sample_arrays(t), *args, out)
        if status:
            msg = _STATUS_MESSAGES.get(status, "dynamics evaluation failed")
            if status == 1:
                raise GeometryError(msg)
            raise DynamicsError(msg)
        return out

    return derivative
