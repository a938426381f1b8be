"""
SchmidtRunner: Schmidt number and entanglement entropy of the biphoton state
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
)
from src.experiments.jsd_runner import build_jsa
from src.models.schmidt import entanglement_entropy, schmidt_decompose, schmidt_number
from src.schema.data_models import JointSpectralAmplitude, SchmidtSpectrum
from src.tools.matrix_parser import MatrixParser
from src.utils.errors import RinglaseError

logger = logging.getLogger(__name__)

REFERENCE_TOLERANCE = 0.10


class SchmidtRunner:
    """K and S per theory power, or for one matrix file given with ``input_path``"""

    def __init__(self, context: RunContext, powers_w: Optional[List[float]] = None,
                 input_path: Optional[str] = None):
        self.context = context
        self.custom_powers = powers_w is not None
        self.powers_w = powers_w if powers_w is not None else context.scenario.biphoton.theory_powers_w
        self.input_path = input_path
        self.parser = MatrixParser()
        self.name = "schmidt"

    def _decompose(self, jsa: JointSpectralAmplitude) -> SchmidtSpectrum:
        return schmidt_decompose(jsa, truncation=self.context.scenario.analysis.schmidt_truncation)

    def _write_spectrum(self, spectrum: SchmidtSpectrum, filename: str) -> str:
        k, s = schmidt_number(spectrum), entanglement_entropy(spectrum)
        frame = pd.DataFrame({"n": np.arange(1, spectrum.coefficients.size + 1),
                              "lambda_n": spectrum.coefficients})
        return self.context.handler.write_csv(frame, filename,
                                              footer=["K,S_bits", f"{k:.12g},{s:.12g}"])

    def _reference(self, index: int) -> Optional[float]:
        """Reference K for the first and last default powers only"""
        if self.custom_powers:
            return None
        references = self.context.scenario.analysis.reference_schmidt_numbers
        if index == 0 and references:
            return references[0]
        if index == len(self.powers_w) - 1 and len(references) > 1:
            return references[-1]
        return None

    def run(self) -> StageResult:
        try:
            if self.input_path:
                return self._run_file()
            return self._run_powers()
        except RinglaseError as e:
            return failure(self.name, e)

    def _run_file(self) -> StageResult:
        jsa, has_phase = self.parser.read(self.input_path)
        spectrum = self._decompose(jsa)
        path = self._write_spectrum(spectrum, "schmidt.csv")
        k = schmidt_number(spectrum)
        return {
            "success": True,
            "stage": self.name,
            "message": f"K={k:.4f} from {self.input_path}"
                       + ("" if has_phase else " (flat phase assumed)"),
            "outputs": [path],
            "schmidt": [{"P_in_W": None, "K": k, "S_bits": entanglement_entropy(spectrum)}],
        }

    def _run_powers(self) -> StageResult:
        scenario = self.context.scenario
        outputs, rows = [], []
        seeds = child_seeds(self.context.seed, len(self.powers_w))
        for index, (power, seed) in enumerate(zip(self.powers_w, seeds)):
            jsa, _, _ = build_jsa(power, scenario, self.context.scheduler, seed)
            spectrum = self._decompose(jsa)
            k, s = schmidt_number(spectrum), entanglement_entropy(spectrum)
            outputs.append(self._write_spectrum(spectrum, f"schmidt_{power_label(power)}.csv"))

            reference = self._reference(index)
            deviation = abs(k - reference) if reference is not None else None
            if deviation is not None and deviation > REFERENCE_TOLERANCE * reference:
                logger.warning(f"K={k:.3f} at {power_label(power)} deviates from the "
                               f"reference {reference} by {deviation:.3f}")
            rows.append({"P_in_W": power, "K": k, "S_bits": s,
                         "K_reference": reference, "abs_deviation": deviation})

        table = pd.DataFrame(rows, columns=["P_in_W", "K", "S_bits", "K_reference",
                                            "abs_deviation"])
        outputs.append(self.context.handler.write_csv(table, "schmidt_summary.csv"))
        numbers = ", ".join(f"{row['K']:.3f}" for row in rows)
        logger.info(f"Schmidt numbers: {numbers}")
        return {
            "success": True,
            "stage": self.name,
            "message": f"K = {numbers}",
            "outputs": outputs,
            "schmidt": rows,
        }
