"""
Shared plumbing for the experiment runners
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from typing_extensions import NotRequired, TypedDict

from src.models.laser_loop import steady_state_at_power
from src.schema.data_models import LasingState, Scenario
from src.tools.file_handler import FileHandler
from src.tools.scheduler import Scheduler
from src.utils.errors import RinglaseError

logger = logging.getLogger(__name__)


class StageResult(TypedDict):
    """What every runner returns"""
    success: bool
    stage: str
    message: str
    outputs: List[str]
    exit_code: NotRequired[int]
    fit: NotRequired[Dict[str, float]]
    max_power_in_w: NotRequired[float]
    summary: NotRequired[List[Dict[str, Any]]]
    schmidt: NotRequired[List[Dict[str, Any]]]
    rows: NotRequired[List[Dict[str, Any]]]
    histogram_car: NotRequired[float]


@dataclass
class RunContext:
    """Everything a runner needs: the scenario, where to write, how to parallelize"""
    scenario: Scenario
    handler: FileHandler
    scheduler: Scheduler

    @property
    def seed(self) -> Optional[int]:
        return self.scenario.seed


def power_label(power_w: float) -> str:
    """File-name tag for a ring input power, e.g. ``2.19mW``"""
    return f"{power_w * 1e3:g}mW"


def child_seeds(seed: Optional[int], count: int) -> List[Optional[np.random.SeedSequence]]:
    """Independent, reproducible seed streams, one per work item"""
    if seed is None:
        return [None] * count
    return list(np.random.SeedSequence(seed).spawn(count))


def state_for_power(power_w: float, scenario: Scenario) -> LasingState:
    return steady_state_at_power(power_w, scenario.loop, scenario.ring, scenario.thermal)


def failure(stage: str, error: RinglaseError) -> StageResult:
    logger.error(f"{stage} failed: {error}")
    return {
        "success": False,
        "stage": stage,
        "message": str(error),
        "exit_code": error.exit_code,
        "outputs": [],
    }
