"""Anisotropic Coulomb ground friction acting at each plate's center.

Each plate carries its weight m*g on the ground. The kinetic friction
coefficient depends on the sliding direction expressed in the plate frame:
xi_forward along the plate's +x axis, xi_backward against it, xi_normal
sideways (the bristle pads grip when dragged backward or laterally). The
hard sign function is replaced by tanh(v / smoothing_eps) so the force
field stays continuous through v = 0; for |v| well above smoothing_eps the
force sits on the usual Coulomb plateau.

No stiction threshold and no friction torque about the plate's own center:
this is a kinetic point-contact model.
"""

from __future__ import annotations

import numpy as np

from .geometry import BodyStates
from .model import RobotParams

__all__ = ["rotation", "local_friction", "global_friction", "assemble_friction"]


def rotation(theta_i: float) -> np.ndarray:
    """Rotation matrix taking plate-frame vectors to the global frame."""
    c, s = np.cos(theta_i), np.sin(theta_i)
    return np.array([[c, -s], [s, c]])


def local_friction(v_local, params: RobotParams):
    """Friction force in the plate frame for a plate-frame velocity.

    The tangential coefficient switches between forward and backward values
    on the sign of the tangential velocity; the smoothed sign keeps the
    product continuous at rest because tanh(0) = 0.
    """
    vt, vn = v_local
    fr = params.friction
    mg = params.m * params.g
    xi_t = np.where(vt > 0.0, fr.xi_forward, fr.xi_backward)
    ft = -mg * xi_t * np.tanh(vt / fr.smoothing_eps)
    fn = -mg * fr.xi_normal * np.tanh(vn / fr.smoothing_eps)
    return ft, fn


def global_friction(v_global, theta_i, params: RobotParams):
    """Friction force in the global frame for one plate.

    Rotates the velocity into the plate frame, applies local_friction, and
    rotates the force back out.
    """
    vx, vy = v_global
    c, s = np.cos(theta_i), np.sin(theta_i)
    vt = c * vx + s * vy
    vn = -s * vx + c * vy
    ft, fn = local_friction((vt, vn), params)
    return c * ft - s * fn, s * ft + c * fn


def assemble_friction(bodies: BodyStates, params: RobotParams):
    """Friction forces on all plates, global frame.

    Plates are independent point contacts, so this is global_friction
    applied elementwise across the chain.
    """
    return global_friction((bodies.vx, bodies.vy), bodies.theta, params)
