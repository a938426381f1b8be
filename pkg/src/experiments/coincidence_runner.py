"""
CoincidenceRunner: pair rate, coincidences and CAR versus ring input power
"""

import logging
from typing import Any, Dict, List, Optional

import pandas as pd

from src.experiments.common import RunContext, StageResult, failure, state_for_power
from src.models.biphoton import pair_generation_rate
from src.models.counting import (
    car,
    car_analytic,
    detected_rates,
    infer_internal_rate,
    simulate_histogram,
)
from src.utils.errors import ConfigError, RinglaseError

logger = logging.getLogger(__name__)


class CoincidenceRunner:
    """Rate/CAR table over the coincidence powers plus one simulated histogram"""

    def __init__(self, context: RunContext, powers_w: Optional[List[float]] = None):
        self.context = context
        self.powers_w = powers_w or context.scenario.analysis.coincidence_powers_w
        self.name = "coincidences"

    def _operating_point(self, power: float) -> Dict[str, Any]:
        scenario = self.context.scenario
        state = state_for_power(power, scenario)
        rate = pair_generation_rate(state, scenario.loop, scenario.biphoton.rate_constant,
                                    n_modes_out=scenario.biphoton.pump_modes)
        rates = detected_rates(rate, scenario.detection, power)
        with_noise, multipair = car_analytic(rate, scenario.detection, power)
        return {
            "P_in_W": power,
            "current_mA": state.current_ma,
            "pair_rate_per_s": rate,
            "singles_signal_per_s": rates.singles_signal,
            "singles_idler_per_s": rates.singles_idler,
            "coincidences_per_s": rates.true_coincidences,
            "inferred_pair_rate_per_s": infer_internal_rate(rates.true_coincidences,
                                                            scenario.detection),
            "car": with_noise,
            "car_multipair_only": multipair,
            "suppression": multipair / with_noise,
        }

    def run(self) -> StageResult:
        scenario = self.context.scenario
        analysis = scenario.analysis
        try:
            if self.context.seed is None:
                raise ConfigError("coincidence simulation needs a seed",
                                  issues=[("seed", "a seed is required for stochastic commands")])
            rows = self.context.scheduler.map_ordered(self._operating_point, self.powers_w)
            outputs = [self.context.handler.write_csv(pd.DataFrame(rows), "coincidences.csv")]

            point = self._operating_point(analysis.histogram_power_w)
            rates = detected_rates(point["pair_rate_per_s"], scenario.detection,
                                   analysis.histogram_power_w)
            histogram = simulate_histogram(rates, scenario.detection,
                                           analysis.histogram_duration_s, self.context.seed,
                                           half_range_bins=analysis.histogram_half_range_bins,
                                           max_chunk_events=analysis.chunk_events,
                                           scheduler=self.context.scheduler)
            frame = pd.DataFrame({"delay_ps": histogram.delays * 1e12,
                                  "counts": histogram.counts})
            outputs.append(self.context.handler.write_csv(frame, "coincidence_histogram.csv"))
            measured = car(histogram)
            logger.info(f"Histogram at {analysis.histogram_power_w * 1e3:g} mW: CAR {measured:.1f} "
                        f"(analytic {point['car']:.1f})")
            return {
                "success": True,
                "stage": self.name,
                "message": f"{len(rows)} operating points, histogram CAR {measured:.1f}",
                "outputs": outputs,
                "rows": rows,
                "histogram_car": measured,
            }
        except RinglaseError as e:
            return failure(self.name, e)
