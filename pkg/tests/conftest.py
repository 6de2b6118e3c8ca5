import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from grwsim import GridSpec, gaussian_packet

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def grid():
    return GridSpec(-8.0, 8.0, 256)


@pytest.fixture
def wide_grid():
    return GridSpec(-20.0, 20.0, 1024)


@pytest.fixture
def packet(grid):
    return gaussian_packet(grid, center=0.0, width=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(123)
