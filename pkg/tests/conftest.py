import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from metricweights import build_grid_space

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def s2():
    return build_grid_space(1, 2, 1.0)


@pytest.fixture
def s3():
    return build_grid_space(1, 3, 1.0)


@pytest.fixture
def line11():
    # 0..10 unit line, the standard cover fixture
    return build_grid_space(1, 11, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
