import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pascluster import AngularGrid, PasMap, grid_for_shape

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


def make_pas(arr) -> PasMap:
    arr = np.asarray(arr, dtype=float)
    return PasMap(grid_for_shape(arr.shape), arr)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_grid() -> AngularGrid:
    return grid_for_shape((8, 8))
