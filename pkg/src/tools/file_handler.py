"""
File handling utilities: atomic CSV and matrix output with provenance headers
"""

import logging
import os
import tempfile
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import pandas as pd

from src.models.spectral import angular_frequency_to_wavelength, angular_span_to_wavelength
from src.schema.data_models import SpectralGrid
from src.utils.config import VERSION, config
from src.utils.errors import DomainError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"


@dataclass(frozen=True)
class Provenance:
    """Where an output came from"""
    config_hash: str
    seed: Optional[int]
    version: str = VERSION
    timestamp: Optional[str] = None

    def lines(self) -> List[str]:
        lines = [f"# ringlase {self.version}",
                 f"# config_sha256={self.config_hash}",
                 f"# seed={'none' if self.seed is None else self.seed}"]
        if self.timestamp:
            lines.append(f"# generated={self.timestamp}")
        return lines


def grid_header(label: str, grid: SpectralGrid) -> str:
    """``# <label>_center_nm=..,<label>_step_pm=..,<label>_points=..``"""
    center_nm = angular_frequency_to_wavelength(grid.center) * 1e9
    step_pm = angular_span_to_wavelength(grid.step, grid.center) * 1e12
    return (f"# {label}_center_nm={center_nm:.10f},{label}_step_pm={step_pm:.10f},"
            f"{label}_points={grid.n_points}")


def format_complex(values: np.ndarray) -> np.ndarray:
    """Render complex numbers as ``re+imj`` strings"""
    return np.array([f"{v.real:.12e}{v.imag:+.12e}j" for v in np.ravel(values)],
                    dtype=object).reshape(np.shape(values))


class FileHandler:
    """Writes run outputs into one directory, each file atomically"""

    def __init__(self, output_dir: Optional[str] = None,
                 provenance: Optional[Provenance] = None):
        self.output_dir = output_dir or config.output_dir
        self.provenance = provenance
        self.written: List[str] = []
        os.makedirs(self.output_dir, exist_ok=True)

    def get_output_path(self, filename: str) -> str:
        return os.path.join(self.output_dir, filename)

    def _header(self) -> List[str]:
        return self.provenance.lines() if self.provenance else []

    def write_text(self, text: str, filename: str) -> str:
        """Write ``text`` to a temp file in the output directory, then rename it in place"""
        path = self.get_output_path(filename)
        fd, tmp_path = tempfile.mkstemp(dir=self.output_dir, prefix=f".{filename}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            os.replace(tmp_path, path)
        except OSError:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
        self.written.append(path)
        logger.info(f"Wrote {path}")
        return path

    def write_csv(self, frame: pd.DataFrame, filename: str,
                  extra_header: Optional[List[str]] = None,
                  footer: Optional[List[str]] = None) -> str:
        """Provenance header, optional '#' lines, the table, then raw ``footer`` lines"""
        lines = self._header() + [f"# {line}" for line in extra_header or []]
        body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        text = "\n".join(lines + [body]) if lines else body
        if footer:
            text += "\n".join(footer) + "\n"
        return self.write_text(text, filename)

    def write_matrix(self, matrix: np.ndarray, signal_grid: SpectralGrid,
                     idler_grid: SpectralGrid, filename: str) -> str:
        """Rows are signal points, columns idler points; complex values as re+imj"""
        if matrix.shape != (signal_grid.n_points, idler_grid.n_points):
            raise DomainError(f"matrix shape {matrix.shape} does not match the grids")
        if np.iscomplexobj(matrix):
            frame = pd.DataFrame(format_complex(matrix))
            body = frame.to_csv(index=False, header=False, lineterminator="\n")
        else:
            body = pd.DataFrame(matrix).to_csv(index=False, header=False,
                                               float_format="%.12e", lineterminator="\n")
        lines = self._header() + [grid_header("signal", signal_grid),
                                  grid_header("idler", idler_grid)]
        return self.write_text("\n".join(lines + [body]), filename)

    def list_output_files(self) -> List[str]:
        try:
            return sorted(os.listdir(self.output_dir))
        except OSError as e:
            logger.error(f"Error listing output files: {e}")
            return []
