"""
JsdRunner: joint spectral amplitudes and densities at the theory pump powers
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from src.experiments.common import (
    RunContext,
    StageResult,
    child_seeds,
    failure,
    power_label,
    state_for_power,
)
from src.models.biphoton import joint_spectral_amplitude, jsd, stimulated_idler_spectrum
from src.models.laser_loop import pump_spectrum, single_mode_pump
from src.models.ring import cold_state
from src.models.spectral import angular_frequency_to_wavelength, make_grid, wavelength_span_to_angular
from src.schema.data_models import (
    HotRingState,
    JointSpectralAmplitude,
    PumpSpectrum,
    Scenario,
    SpectralGrid,
)
from src.tools.scheduler import Scheduler
from src.utils.errors import ConfigError, RinglaseError

logger = logging.getLogger(__name__)

SINGLE_MODE_POWER_W = 1e-3


def resonance_grid(center: float, step_m: float, n_points: int) -> SpectralGrid:
    """Grid centered on a resonance, ``step_m`` taken at the resonance wavelength"""
    step = wavelength_span_to_angular(step_m, angular_frequency_to_wavelength(center))
    return make_grid(center, step * (n_points - 1), n_points)


def biphoton_grids(hot: HotRingState, scenario: Scenario) -> Tuple[SpectralGrid, SpectralGrid]:
    params = scenario.biphoton
    return (resonance_grid(hot.signal_center, params.signal_step_m, params.signal_points),
            resonance_grid(hot.idler_center, params.idler_step_m, params.idler_points))


def theory_pump(power_w: float, scenario: Scenario,
                seed=None) -> Tuple[PumpSpectrum, HotRingState]:
    """Pump comb and hot ring at ``power_w``; zero power forces a single-mode pump on the cold ring"""
    if power_w == 0:
        hot = cold_state(scenario.ring)
        spacing = wavelength_span_to_angular(scenario.loop.mode_spacing_m,
                                             scenario.ring.pump_wavelength_m)
        return single_mode_pump(hot.pump_center, SINGLE_MODE_POWER_W, spacing), hot
    if scenario.biphoton.theory_phase_model == "random" and seed is None:
        raise ConfigError("random pump phases need a seed",
                          issues=[("seed", "a seed is required for random pump phases")])
    state = state_for_power(power_w, scenario)
    pump = pump_spectrum(state, scenario.loop, n_modes_out=scenario.biphoton.pump_modes,
                         seed=seed, phase_model=scenario.biphoton.theory_phase_model)
    return pump, state.hot


def build_jsa(power_w: float, scenario: Scenario, scheduler: Scheduler,
              seed=None) -> Tuple[JointSpectralAmplitude, PumpSpectrum, HotRingState]:
    pump, hot = theory_pump(power_w, scenario, seed)
    signal_grid, idler_grid = biphoton_grids(hot, scenario)
    jsa = joint_spectral_amplitude(pump, hot, signal_grid, idler_grid, scheduler=scheduler)
    return jsa, pump, hot


def stimulated_jsd(pump: PumpSpectrum, hot: HotRingState, signal_grid: SpectralGrid,
                   idler_grid: SpectralGrid, scheduler: Scheduler) -> np.ndarray:
    """JSD reconstructed by sweeping a CW seed across the signal grid"""
    rows = scheduler.map_ordered(
        lambda omega: stimulated_idler_spectrum(omega, pump, hot, idler_grid, signal_grid),
        signal_grid.points)
    density = np.vstack(rows)
    return density / (density.sum() * signal_grid.step * idler_grid.step)


class JsdRunner:
    """Spontaneous JSA/JSD and the stimulated-emission reconstruction per power"""

    def __init__(self, context: RunContext, powers_w: Optional[List[float]] = None):
        self.context = context
        self.powers_w = powers_w if powers_w is not None else context.scenario.biphoton.theory_powers_w
        self.name = "jsd"

    def run(self) -> StageResult:
        scenario = self.context.scenario
        handler = self.context.handler
        outputs = []
        try:
            seeds = child_seeds(self.context.seed, len(self.powers_w))
            for power, seed in zip(self.powers_w, seeds):
                label = "single_mode" if power == 0 else power_label(power)
                jsa, pump, hot = build_jsa(power, scenario, self.context.scheduler, seed)
                signal_grid, idler_grid = jsa.signal_grid, jsa.idler_grid

                outputs.append(handler.write_matrix(jsa.amplitudes, signal_grid, idler_grid,
                                                    f"jsa_{label}.csv"))
                outputs.append(handler.write_matrix(jsd(jsa), signal_grid, idler_grid,
                                                    f"jsd_{label}.csv"))
                reconstructed = stimulated_jsd(pump, hot, signal_grid, idler_grid,
                                               self.context.scheduler)
                outputs.append(handler.write_matrix(reconstructed, signal_grid, idler_grid,
                                                    f"jsd_stimulated_{label}.csv"))
                logger.info(f"JSD at {label}: {pump.n_active} pump modes")
            return {
                "success": True,
                "stage": self.name,
                "message": f"{len(self.powers_w)} joint spectra",
                "outputs": outputs,
            }
        except RinglaseError as e:
            return failure(self.name, e)
