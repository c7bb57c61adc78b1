"""Shared fixtures. Puts backend/ on sys.path the way the scripts do."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.core.evolution.bitcore import RandomStream  # noqa: E402
from app.core.evolution.ojzj import OjzjInstance  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch):
    """No NSGA3_* variable from the developer's shell leaks into a test."""
    for name in ("NSGA3_OUTPUT_DIR", "NSGA3_WORKERS", "NSGA3_LOG_LEVEL", "NSGA3_DEFAULT_BUDGET"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def rng():
    return RandomStream(12345)


@pytest.fixture
def small_instance():
    """2-OJZJ_2 with n=8: blocks of length 8, f_max=10, seven front vectors."""
    return OjzjInstance(8, 2, 2)


@pytest.fixture
def four_objective_instance():
    """4-OJZJ_2 with n=8: two blocks of length 4."""
    return OjzjInstance(8, 4, 2)
