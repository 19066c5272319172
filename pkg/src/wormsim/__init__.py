"""Planar dynamics simulator for a segmented earthworm-like robot.

The robot is a chain of n+1 rigid plates connected by n segments whose left
and right actuator lengths are prescribed functions of time. The package
covers the shape kinematics, anisotropic Coulomb ground friction, two
reduced dynamic closures plus an anchor-based no-slip baseline, the
standard gait families, trajectory metrics, and a batch CLI.
"""

from .analysis import (
    Metrics,
    average_velocity,
    compute_metrics,
    cycle_displacement,
    fit_circle,
    fit_slope,
)
from .dynamics import (
    Accel,
    HeadState,
    InternalForces,
    head_acceleration,
    head_acceleration_paper,
    head_acceleration_projection,
    internal_forces,
    reconstruct_bodies,
)
from .errors import (
    ConfigError,
    DynamicsError,
    GaitError,
    GeometryError,
    SimulationError,
    WormsimError,
)
from .friction import assemble_friction, global_friction, local_friction, rotation
from .gait import ActuationSample, ActuationTrajectory, GaitConfig, anchor_at, build_gait, sample
from .geometry import (
    BodyStates,
    LinkVectors,
    SegmentShape,
    body_headings,
    body_positions,
    body_velocities,
    link_vectors,
    segment_shape,
)
from .model import (
    FrictionParams,
    Operators,
    RobotParams,
    angle_diagonals,
    build_operators,
    validate_params,
)
from .simulate import Trajectory, kinematic_predict, rk4_step, simulate

__version__ = "0.1.0"
