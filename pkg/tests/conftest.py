"""Shared fixtures for the cubic_siegel test suite."""

import os

import pytest

# Keep tests reproducible regardless of the machine's core count
os.environ.setdefault("CUBIC_SIEGEL_ENV", "development")
os.environ.setdefault("CUBIC_SIEGEL_THREADS", "1")

from cubic_siegel.capture import capture_centers
from cubic_siegel.config import reset_config
from cubic_siegel.family import GOLDEN, CubicSiegelMap, make_rotation
from cubic_siegel.siegel import build_linearization


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


@pytest.fixture(scope="session")
def silver():
    """θ = [0;(2)] = √2 - 1."""
    return make_rotation("[0;(2)]")


@pytest.fixture(scope="session")
def lin3():
    """Linearization of P_3 for the golden mean (level-1 center)."""
    return build_linearization(CubicSiegelMap.p_c(3.0))


@pytest.fixture(scope="session")
def census3():
    """Golden-mean census up to level 3."""
    return capture_centers(GOLDEN, 3)


@pytest.fixture
def fresh_config():
    """Drop the cached configuration before and after a test."""
    reset_config()
    yield
    reset_config()
