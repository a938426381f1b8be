"""
Spectral core: unit conversion, uniform grids and Lorentzian line amplitudes

Internal spectral math is done in angular frequency; wavelengths appear only
at the boundaries (configuration and CSV headers).
"""

from typing import Union

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from src.schema.data_models import LorentzianLine, SpectralGrid
from src.utils.errors import DomainError

ArrayLike = Union[float, np.ndarray]

TWO_PI_C = 2 * np.pi * SPEED_OF_LIGHT


def _require_positive(value: ArrayLike, name: str) -> None:
    if np.any(np.asarray(value) <= 0) or np.any(~np.isfinite(np.asarray(value))):
        raise DomainError(f"{name} must be strictly positive and finite, got {value!r}")


def wavelength_to_angular_frequency(wavelength: ArrayLike) -> ArrayLike:
    """omega = 2 pi c / lambda"""
    _require_positive(wavelength, "wavelength")
    return TWO_PI_C / wavelength


def angular_frequency_to_wavelength(omega: ArrayLike) -> ArrayLike:
    """lambda = 2 pi c / omega"""
    _require_positive(omega, "angular frequency")
    return TWO_PI_C / omega


def wavelength_span_to_angular(span: float, center_wavelength: float) -> float:
    """First-order conversion of a wavelength interval taken at the grid center"""
    _require_positive(center_wavelength, "center wavelength")
    return TWO_PI_C * span / center_wavelength ** 2


def angular_span_to_wavelength(span: float, center_omega: float) -> float:
    """Inverse of wavelength_span_to_angular at the same center"""
    center_wavelength = angular_frequency_to_wavelength(center_omega)
    return span * center_wavelength ** 2 / TWO_PI_C


def lorentzian_amplitude(omega: ArrayLike, line: LorentzianLine) -> ArrayLike:
    """F(omega) = (G/2) / (G/2 + i (omega - omega0))"""
    half = line.fwhm / 2
    return half / (half + 1j * (np.asarray(omega) - line.center))


def make_line(center: float, fwhm: float) -> LorentzianLine:
    _require_positive(fwhm, "fwhm")
    return LorentzianLine(center=center, fwhm=fwhm)


def make_grid(center: float, span: float, n_points: int) -> SpectralGrid:
    """Uniform grid from center - span/2 to center + span/2"""
    if int(n_points) != n_points or n_points < 2:
        raise DomainError(f"n_points must be an integer >= 2, got {n_points!r}")
    _require_positive(span, "span")
    return SpectralGrid(center=float(center), span=float(span), n_points=int(n_points))


def make_grid_from_wavelength(center_wavelength: float, span_wavelength: float,
                              n_points: int) -> SpectralGrid:
    """Grid uniform in omega whose wavelength span is taken at the center"""
    center = wavelength_to_angular_frequency(center_wavelength)
    span = wavelength_span_to_angular(span_wavelength, center_wavelength)
    return make_grid(center, span, n_points)
