"""Pytest configuration and fixtures"""
import math

import numpy as np
import pytest

from src.config import _ENV_NAMES
from src.models.alm_set import AlmSet
from src.models.ring_grid import RingDescriptor
from src.models.sky_map import SkyMap
from src.processors.grid import make_custom_grid, make_ecp_grid


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep SHT_* variables from the developer's shell out of the tests"""
    for env_name in _ENV_NAMES.values():
        monkeypatch.delenv(env_name, raising=False)


@pytest.fixture
def ecp_grid_1():
    """4 rings at pi/8 .. 7pi/8 with 4 samples each"""
    return make_ecp_grid(1)


@pytest.fixture
def ecp_grid_8():
    return make_ecp_grid(8)


@pytest.fixture
def constant_alm_8():
    """Only a_00 = sqrt(4 pi): the field is 1.0 everywhere"""
    return AlmSet.from_dict(8, 8, {(0, 0): math.sqrt(4.0 * math.pi)})


@pytest.fixture
def random_alm_8():
    return AlmSet.random(8, seed=7)


@pytest.fixture
def random_alm_16():
    return AlmSet.random(16, seed=3)


@pytest.fixture
def equator_grid():
    """Single equatorial ring with 4 samples"""
    return make_custom_grid([RingDescriptor.from_theta(math.pi / 2, 4)])


@pytest.fixture
def uneven_grid():
    """Symmetric grid with rings of 2, 3, 4 and 7 samples"""
    thetas = [0.4, 1.1, math.pi - 1.1, math.pi - 0.4]
    n_phi = [2, 3, 7, 4]
    phi_0 = [0.0, 0.3, 0.0, 1.0]
    return make_custom_grid([
        RingDescriptor.from_theta(t, n, p) for t, n, p in zip(thetas, n_phi, phi_0)
    ])


@pytest.fixture
def constant_map(ecp_grid_1):
    """SkyMap equal to 2.5 on every pixel"""
    return SkyMap(grid=ecp_grid_1, values=[np.full(4, 2.5) for _ in range(4)])


@pytest.fixture
def gradient_map(ecp_grid_1):
    """SkyMap whose samples count up 0..15 in ring order"""
    values = [np.arange(4 * r, 4 * r + 4, dtype=np.float64) for r in range(4)]
    return SkyMap(grid=ecp_grid_1, values=values)
