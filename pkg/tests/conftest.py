"""Shared fixtures for the csqs-lab test suite."""

import math

import pytest

from csqs_lab.core.config import ConfigManager, set_config_manager
from csqs_lab.core.config_models import Tolerances
from csqs_lab.core.csqs_model import StateParams, normalize

SQRT_HALF = 1 / math.sqrt(2)


@pytest.fixture(autouse=True)
def isolated_config():
    """Every test sees default configuration, untouched by CSQS_LAB_* variables."""
    manager = ConfigManager(use_environment=False)
    set_config_manager(manager)
    yield manager
    set_config_manager(None)


@pytest.fixture
def tol() -> Tolerances:
    return Tolerances()


@pytest.fixture
def make_state():
    """Build a normalized state from α and t (r on the nonnegative branch)."""

    def _make(alpha: complex, t: float):
        return normalize(StateParams.from_t(alpha, t))

    return _make


@pytest.fixture
def output_dir(tmp_path):
    path = tmp_path / "out"
    path.mkdir()
    return path
