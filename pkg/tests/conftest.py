import pytest

from wormsim import (
    FrictionParams,
    GaitConfig,
    RobotParams,
    build_gait,
    kinematic_predict,
    simulate,
)


@pytest.fixture(scope="session")
def default_params():
    return RobotParams()


@pytest.fixture(scope="session")
def frictionless_params():
    return RobotParams(friction=FrictionParams(xi_forward=0.0, xi_backward=0.0,
                                               xi_normal=0.0))


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels(default_params):
    # first call triggers numba compilation; keep it out of timed tests
    gait = build_gait(GaitConfig(), default_params)
    simulate(default_params, gait, "paper", 0.05, 1e-3)
    simulate(default_params, gait, "projection", 0.05, 1e-3)
    kinematic_predict(default_params, gait, 0.05, 1e-3)
