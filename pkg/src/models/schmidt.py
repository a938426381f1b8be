"""
Schmidt decomposition of a pure biphoton state
"""

import logging
from typing import Union

import numpy as np
from scipy.linalg import svd

from src.schema.data_models import JointSpectralAmplitude, SchmidtSpectrum
from src.utils.errors import AnalysisError

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 1e-12


def schmidt_decompose(jsa: Union[JointSpectralAmplitude, np.ndarray],
                      truncation: float = DEFAULT_TRUNCATION) -> SchmidtSpectrum:
    """Schmidt coefficients lambda_n = sigma_n^2 / sum sigma^2

    ``jsa`` may be a JointSpectralAmplitude (weighted by sqrt of the cell
    area) or a bare amplitude matrix. Coefficients below ``truncation`` times
    the leading one are dropped and the rest renormalized.
    """
    if isinstance(jsa, JointSpectralAmplitude):
        matrix = jsa.amplitudes * np.sqrt(jsa.cell_area)
    else:
        matrix = np.asarray(jsa)
    if matrix.ndim != 2 or matrix.size == 0:
        raise AnalysisError(f"expected a non-empty 2D amplitude matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise AnalysisError("amplitude matrix contains non-finite values")

    singular = svd(matrix, compute_uv=False)
    weights = singular ** 2
    total = weights.sum()
    if total <= 0:
        raise AnalysisError("amplitude matrix is identically zero")

    weights = np.sort(weights)[::-1] / total
    kept = weights[weights >= truncation * weights[0]]
    return SchmidtSpectrum(coefficients=kept / kept.sum())


def schmidt_number(spectrum: SchmidtSpectrum) -> float:
    """K = 1 / sum lambda_n^2"""
    return float(1.0 / np.sum(spectrum.coefficients ** 2))


def entanglement_entropy(spectrum: SchmidtSpectrum) -> float:
    """Von Neumann entropy of either photon, in bits"""
    coefficients = spectrum.coefficients[spectrum.coefficients > 0]
    return float(max(-np.sum(coefficients * np.log2(coefficients)), 0.0))


def purity(spectrum: SchmidtSpectrum) -> float:
    # single-photon purity, 1/K
    return float(np.sum(spectrum.coefficients ** 2))
