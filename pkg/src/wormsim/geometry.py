"""Shape kinematics: actuator lengths -> segment shape -> plate poses.

A segment whose left and right actuator lengths differ deforms into an
isosceles trapezoid: the two plates (width r) are the equal legs, the
actuator lines are the parallel sides. That closure gives a unique relative
plate angle

    phi = 2 asin((l_r - l_l) / (2 r))

and a midline of length lbar = (l_l + l_r)/2 joining the plate centers,
aimed along the bisector of the two plate headings. phi > 0 when the right
actuator is the longer one, and the next plate heading is theta - phi.

All functions are vectorized over segments and carry first and second time
derivatives through the exact chain rule. Second derivatives of the link
vectors are returned split as ddL = A + B * alpha1, where alpha1 (the head
angular acceleration) is unknown until the dynamics closes the equations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

__all__ = [
    "SegmentShape",
    "LinkVectors",
    "BodyStates",
    "segment_shape",
    "body_headings",
    "link_vectors",
    "body_positions",
    "body_velocities",
]


def _cum0(a):
    """Sums of all entries strictly before each index: [0, a0, a0+a1, ...]."""
    out = np.empty(len(a) + 1)
    out[0] = 0.0
    np.cumsum(a, out=out[1:])
    return out


@dataclass(frozen=True)
class SegmentShape:
    """Per-segment trapezoid shape and its first two time derivatives."""

    phi: np.ndarray
    dphi: np.ndarray
    ddphi: np.ndarray
    lbar: np.ndarray
    dlbar: np.ndarray
    ddlbar: np.ndarray

    @property
    def n(self):
        return len(self.phi)


@dataclass(frozen=True)
class LinkVectors:
    """Plate-center-to-plate-center vectors with derivative data.

    ddL is affine in the head angular acceleration: ddLx = Ax + Bx*alpha1
    (same for y). ddL(alpha1) evaluates the split once alpha1 is known.
    """

    Lx: np.ndarray
    Ly: np.ndarray
    dLx: np.ndarray
    dLy: np.ndarray
    Ax: np.ndarray
    Ay: np.ndarray
    Bx: np.ndarray
    By: np.ndarray

    def ddL(self, alpha1: float):
        return self.Ax + self.Bx * alpha1, self.Ay + self.By * alpha1


@dataclass(frozen=True)
class BodyStates:
    """Poses and velocities of all n+1 plates."""

    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    omega: np.ndarray


def segment_shape(l_l, l_r, dl_l, dl_r, ddl_l, ddl_r, r) -> SegmentShape:
    """Map actuator lengths (and their derivatives) to trapezoid shape.

    Arguments are scalars or per-segment arrays. Lengths must be positive
    and |l_r - l_l| < 2r, otherwise the trapezoid cannot close.
    """
    l_l = np.atleast_1d(np.asarray(l_l, dtype=float))
    l_r = np.atleast_1d(np.asarray(l_r, dtype=float))
    dl_l = np.broadcast_to(np.asarray(dl_l, dtype=float), l_l.shape)
    dl_r = np.broadcast_to(np.asarray(dl_r, dtype=float), l_l.shape)
    ddl_l = np.broadcast_to(np.asarray(ddl_l, dtype=float), l_l.shape)
    ddl_r = np.broadcast_to(np.asarray(ddl_r, dtype=float), l_l.shape)
    if np.any(l_l <= 0.0) or np.any(l_r <= 0.0):
        raise GeometryError("actuator lengths must be positive")
    u = (l_r - l_l) / (2.0 * r)
    if np.any(np.abs(u) >= 1.0):
        raise GeometryError(
            f"|l_r - l_l| must stay below 2r = {2 * r:.6g} for the trapezoid to close"
        )
    phi = 2.0 * np.arcsin(u)
    half = 0.5 * phi
    c = np.cos(half)
    dphi = (dl_r - dl_l) / (r * c)
    # d/dt of dphi, using tan(phi/2) = u / cos(phi/2)
    ddphi = (ddl_r - ddl_l) / (r * c) + 0.5 * dphi * dphi * np.tan(half)
    return SegmentShape(
        phi=phi,
        dphi=dphi,
        ddphi=ddphi,
        lbar=0.5 * (l_l + l_r),
        dlbar=0.5 * (dl_l + dl_r),
        ddlbar=0.5 * (ddl_l + ddl_r),
    )


def body_headings(theta1, phi):
    """Headings of all n+1 plates: theta_i = theta1 - sum(phi_j, j < i)."""
    return theta1 - _cum0(np.asarray(phi, dtype=float))


def link_vectors(theta, dtheta, shape: SegmentShape) -> LinkVectors:
    """Link vectors between consecutive plate centers, with derivatives.

    theta, dtheta are the n+1 plate headings and heading rates. The midline
    of segment i bisects the headings of its two plates, beta_i =
    theta_i - phi_i/2, so L_i = lbar_i (cos beta_i, sin beta_i).
    """
    theta = np.asarray(theta, dtype=float)
    dtheta = np.asarray(dtheta, dtype=float)
    n = shape.n
    if len(theta) != n + 1 or len(dtheta) != n + 1:
        raise ValueError(f"expected {n + 1} headings for {n} segments")
    beta = theta[:-1] - 0.5 * shape.phi
    dbeta = dtheta[:-1] - 0.5 * shape.dphi
    # beta acceleration with the unknown head term alpha1 removed
    b0 = -_cum0(shape.ddphi)[:-1] - 0.5 * shape.ddphi
    cb = np.cos(beta)
    sb = np.sin(beta)
    lb, dlb, ddlb = shape.lbar, shape.dlbar, shape.ddlbar
    return LinkVectors(
        Lx=lb * cb,
        Ly=lb * sb,
        dLx=dlb * cb - lb * sb * dbeta,
        dLy=dlb * sb + lb * cb * dbeta,
        Ax=ddlb * cb - 2.0 * dlb * dbeta * sb - lb * dbeta * dbeta * cb - lb * sb * b0,
        Ay=ddlb * sb + 2.0 * dlb * dbeta * cb - lb * dbeta * dbeta * sb + lb * cb * b0,
        Bx=-lb * sb,
        By=lb * cb,
    )


def body_positions(head_xy, links: LinkVectors):
    """Positions of all plates from the head position and the link chain.

    x_i = x1 - sum(Lx_j, j < i), so D1 @ X reproduces Lx exactly.
    """
    x1, y1 = head_xy
    return x1 - _cum0(links.Lx), y1 - _cum0(links.Ly)


def body_velocities(head_rates, links: LinkVectors, shape: SegmentShape):
    """Velocities of all plates from the head rates and the shape rates."""
    vx1, vy1, omega1 = head_rates
    vx = vx1 - _cum0(links.dLx)
    vy = vy1 - _cum0(links.dLy)
    omega = omega1 - _cum0(shape.dphi)
    return vx, vy, omega
