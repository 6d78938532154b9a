import numpy as np
import pytest

from src.numerics.spectral_core import GridSpec, Profile
from src.numerics.bridge import BRIDGE_GRID


@pytest.fixture(scope="session")
def grid():
    return GridSpec()


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(20.0, 256)


@pytest.fixture(scope="session")
def bridge_grid():
    return BRIDGE_GRID


@pytest.fixture(scope="session")
def sech(grid):
    return Profile.from_function(grid, lambda t: 1.0 / np.cosh(t), "even")


@pytest.fixture(scope="session")
def bridge_sech(bridge_grid):
    return Profile.from_function(bridge_grid, lambda t: 1.0 / np.cosh(t), "even")


@pytest.fixture
def opt():
    """Namespace standing in for parsed verify flags."""
    from argparse import Namespace
    return Namespace(tau=None, lmax=10, seed=0)
