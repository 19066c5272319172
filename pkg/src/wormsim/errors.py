"""Exception types shared across the package."""


class WormsimError(Exception):
    """Base class for all package errors."""


class ConfigError(WormsimError):
    """Invalid run configuration. ``key`` names the offending config entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class GaitError(WormsimError):
    """Actuation signal violates a geometric bound or smoothness requirement."""

    def __init__(self, message, segment=None, side=None, t=None):
        self.segment = segment
        self.side = side
        self.t = t
        where = []
        if segment is not None:
            where.append(f"segment {segment}")
        if side is not None:
            where.append(f"side {side}")
        if t is not None:
            where.append(f"t={t:.6f}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class GeometryError(WormsimError):
    """Prescribed actuator lengths cannot close the segment trapezoid."""


class DynamicsError(WormsimError):
    """Equation assembly produced an inconsistent or non-finite system."""


class SimulationError(WormsimError):
    """Time integration failed. ``t`` is the failing timestamp."""

    def __init__(self, message, t=None):
        self.t = t
        if t is not None:
            message = f"{message} at t={t:.6f}"
        super().__init__(message)
