"""
LasingCurveRunner: supply-current sweep of the loop laser
"""

import logging

from src.experiments.common import RunContext, StageResult, failure
from src.models.laser_loop import lasing_curve, linear_fit
from src.utils.errors import RinglaseError

logger = logging.getLogger(__name__)


class LasingCurveRunner:
    """Monitor power, ring input power, redshift and linewidth versus current"""

    def __init__(self, context: RunContext):
        self.context = context
        self.name = "lasing-curve"

    def run(self) -> StageResult:
        scenario = self.context.scenario
        analysis = scenario.analysis
        try:
            currents = self.context.scheduler.generate_current_points(
                analysis.current_start_ma, analysis.current_stop_ma, analysis.current_step_ma)
            curve = lasing_curve(currents, scenario.loop, scenario.ring, scenario.thermal,
                                 scheduler=self.context.scheduler)
            fit = linear_fit(curve, tuple(analysis.fit_window_ma))

            extra = [f"fit_threshold_mA={fit['threshold_ma']:.6f},"
                     f"fit_slope_W_per_mA={fit['slope_w_per_ma']:.6e}"]
            path = self.context.handler.write_csv(curve, "lasing_curve.csv", extra_header=extra)
            logger.info(f"Lasing threshold {fit['threshold_ma']:.2f} mA, "
                        f"slope {fit['slope_w_per_ma'] * 1e9:.2f} nW/mA")
            return {
                "success": True,
                "stage": self.name,
                "message": f"{len(curve)} current points",
                "outputs": [path],
                "fit": fit,
                "max_power_in_w": float(curve["P_in_W"].max()),
            }
        except RinglaseError as e:
            return failure(self.name, e)
