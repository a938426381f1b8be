"""
PumpSpectraRunner: multimode lasing spectra at several ring input powers
"""

import logging
from typing import List, Optional

import numpy as np
import pandas as pd

from src.experiments.common import (
    RunContext,
    StageResult,
    child_seeds,
    failure,
    power_label,
    state_for_power,
)
from src.models.biphoton import pump_spectral_overlap
from src.models.laser_loop import emission_fwhm_wavelength, pump_spectrum
from src.models.ring import describe, redshift
from src.models.spectral import angular_frequency_to_wavelength
from src.utils.errors import RinglaseError

logger = logging.getLogger(__name__)


class PumpSpectraRunner:
    """One per-mode power spectrum per power plus a summary table"""

    def __init__(self, context: RunContext, powers_w: Optional[List[float]] = None):
        self.context = context
        self.powers_w = powers_w or context.scenario.analysis.spectra_powers_w
        self.name = "pump-spectra"

    def run(self) -> StageResult:
        scenario = self.context.scenario
        outputs, summary = [], []
        try:
            seeds = child_seeds(self.context.seed, len(self.powers_w))
            for power, seed in zip(self.powers_w, seeds):
                state = state_for_power(power, scenario)
                pump = pump_spectrum(state, scenario.loop,
                                     n_modes_out=scenario.biphoton.pump_modes, seed=seed)
                center = angular_frequency_to_wavelength(pump.grid.center)
                wavelengths = angular_frequency_to_wavelength(pump.grid.points)
                frame = pd.DataFrame({
                    "wavelength_nm": wavelengths * 1e9,
                    "detuning_pm": (wavelengths - center) * 1e12,
                    "power_W": pump.mode_powers,
                })
                outputs.append(self.context.handler.write_csv(
                    frame, f"pump_spectrum_{power_label(power)}.csv"))

                _, ring_fwhm = describe(state.hot)
                summary.append({
                    "P_in_W": power,
                    "current_mA": state.current_ma,
                    "shift_pm": redshift(scenario.ring, state.hot) * 1e12,
                    "ring_fwhm_pm": ring_fwhm * 1e12,
                    "emission_fwhm_pm": emission_fwhm_wavelength(pump) * 1e12,
                    "active_modes": pump.n_active,
                    "overlap": pump_spectral_overlap(pump, state.hot),
                })

            table = pd.DataFrame(summary)
            outputs.append(self.context.handler.write_csv(table, "pump_spectra_summary.csv"))
            widths = ", ".join(f"{w:.1f}" for w in np.asarray(table["emission_fwhm_pm"]))
            logger.info(f"Emission FWHM (pm): {widths}")
            return {
                "success": True,
                "stage": self.name,
                "message": f"{len(self.powers_w)} spectra",
                "outputs": outputs,
                "summary": summary,
            }
        except RinglaseError as e:
            return failure(self.name, e)
