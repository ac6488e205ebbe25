import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from herzlab.field import GridSpec
from herzlab.lpdecomp import build_dyadic_system

settings.register_profile(
    "herzlab", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("herzlab")


@pytest.fixture
def grid1():
    return GridSpec(1, 8.0, 512)


@pytest.fixture
def grid2():
    return GridSpec(2, 8.0, 64)


@pytest.fixture
def sys1(grid1):
    return build_dyadic_system(grid1)


@pytest.fixture
def sys2(grid2):
    return build_dyadic_system(grid2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
