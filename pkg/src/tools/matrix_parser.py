"""
Reader for JSA/JSD matrix CSV files
"""

import io
import logging
import re
from typing import Dict, Tuple

import numpy as np
import pandas as pd

from src.models.spectral import make_grid_from_wavelength
from src.schema.data_models import JointSpectralAmplitude, SpectralGrid
from src.utils.errors import AnalysisError

logger = logging.getLogger(__name__)

GRID_PATTERN = re.compile(r"(signal|idler)_(center_nm|step_pm|points)=([-+0-9.eE]+)")


class MatrixParser:
    """Parses the matrix format written by FileHandler.write_matrix"""

    def parse_header(self, lines) -> Dict[str, SpectralGrid]:
        values: Dict[str, Dict[str, float]] = {"signal": {}, "idler": {}}
        for line in lines:
            for label, key, value in GRID_PATTERN.findall(line):
                values[label][key] = float(value)

        grids = {}
        for label, meta in values.items():
            if set(meta) != {"center_nm", "step_pm", "points"}:
                raise AnalysisError(f"matrix header lacks complete {label} grid metadata")
            n_points = int(meta["points"])
            grids[label] = make_grid_from_wavelength(meta["center_nm"] * 1e-9,
                                                     meta["step_pm"] * 1e-12 * (n_points - 1),
                                                     n_points)
        return grids

    def parse_body(self, text: str) -> np.ndarray:
        frame = pd.read_csv(io.StringIO(text), header=None, comment="#", dtype=str)
        cells = frame.to_numpy()
        if any(cell.strip().endswith("j") for cell in cells.ravel()):
            return np.vectorize(lambda cell: complex(cell.strip()), otypes=[complex])(cells)
        return cells.astype(float)

    def read(self, path: str) -> Tuple[JointSpectralAmplitude, bool]:
        """Load a matrix file as a JSA; the flag is True when phase information was present

        A real (JSD) matrix is turned into amplitudes as sqrt(JSD) with a flat phase.
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise AnalysisError(f"cannot read matrix file {path}: {e}") from e

        header = [line for line in text.splitlines() if line.startswith("#")]
        grids = self.parse_header(header)
        matrix = self.parse_body(text)
        expected = (grids["signal"].n_points, grids["idler"].n_points)
        if matrix.shape != expected:
            raise AnalysisError(f"matrix shape {matrix.shape} does not match header {expected}")

        has_phase = np.iscomplexobj(matrix)
        if not has_phase:
            if np.any(matrix < 0):
                raise AnalysisError("JSD matrix has negative entries")
            logger.info(f"{path}: real matrix read as a JSD; assuming a flat spectral phase")
            matrix = np.sqrt(matrix).astype(complex)
        return JointSpectralAmplitude(signal_grid=grids["signal"], idler_grid=grids["idler"],
                                      amplitudes=matrix), has_phase
