import os

import pytest

from src.config.scenario_config import load_scenario
from src.models.ring import cold_state, hot_state
from src.schema.data_models import (
    DetectionChain,
    LoopParams,
    RingParams,
    ThermalNonlinearParams,
)

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG = os.path.join(REPO_ROOT, "configs", "default_scenario.json")


@pytest.fixture
def default_config_path():
    return DEFAULT_CONFIG


@pytest.fixture
def scenario():
    loaded, _ = load_scenario(DEFAULT_CONFIG)
    return loaded


@pytest.fixture
def ring():
    return RingParams()


@pytest.fixture
def thermal():
    return ThermalNonlinearParams()


@pytest.fixture
def loop():
    return LoopParams()


@pytest.fixture
def chain():
    return DetectionChain()


@pytest.fixture
def cold_ring(ring):
    return cold_state(ring)


@pytest.fixture
def hot_ring(ring, thermal):
    return hot_state(ring, thermal, 1.0e-3)
