"""
Cold and power-dependent ("hot") model of the add-drop racetrack resonator

Each resonance is a single-pole Lorentzian characterized by its center and
loaded Q. Circulating power redshifts every resonance linearly (thermo-optic
effect) and broadens every linewidth linearly (TPA).
"""

import logging
from typing import Dict, Tuple

import numpy as np

from src.models.spectral import (
    TWO_PI_C,
    ArrayLike,
    lorentzian_amplitude,
    wavelength_span_to_angular,
    wavelength_to_angular_frequency,
)
from src.schema.data_models import (
    RESONANCES,
    HotRingState,
    RingParams,
    ThermalNonlinearParams,
)
from src.utils.errors import DomainError

logger = logging.getLogger(__name__)


def resonance_fwhm(center_wavelength: float, q: float) -> float:
    """Linewidth in wavelength, lambda/Q"""
    if q <= 0:
        raise DomainError(f"quality factor must be positive, got {q}")
    if center_wavelength <= 0:
        raise DomainError(f"wavelength must be positive, got {center_wavelength}")
    return center_wavelength / q


def fsr(center_wavelength: float, group_index: float, length: float) -> float:
    """Free spectral range in wavelength, lambda^2 / (n_g L)"""
    if min(center_wavelength, group_index, length) <= 0:
        raise DomainError("wavelength, group index and length must all be positive")
    return center_wavelength ** 2 / (group_index * length)


def cold_centers(ring: RingParams) -> Dict[str, float]:
    """Cold resonance centers in rad/s

    With ``energy_matched`` the signal and idler centers are moved by the same
    angular frequency so that omega_s + omega_i = 2 omega_p; their separation
    is unchanged.
    """
    centers = {which: float(wavelength_to_angular_frequency(ring.wavelength(which)))
               for which in RESONANCES}
    if ring.energy_matched:
        mismatch = 0.5 * (centers["signal"] + centers["idler"] - 2 * centers["pump"])
        centers["signal"] -= mismatch
        centers["idler"] -= mismatch
    return centers


def cold_fwhms(ring: RingParams) -> Dict[str, float]:
    """Cold linewidths in rad/s"""
    fwhms = {}
    for which in RESONANCES:
        wavelength = ring.wavelength(which)
        fwhms[which] = wavelength_span_to_angular(resonance_fwhm(wavelength, ring.q(which)),
                                                  wavelength)
    return fwhms


def hot_state(ring: RingParams, tn: ThermalNonlinearParams, power_in: float) -> HotRingState:
    """Resonances at ring input power ``power_in`` (W)"""
    if power_in < 0 or not np.isfinite(power_in):
        raise DomainError(f"ring input power must be non-negative, got {power_in}")
    shift = tn.shift_coefficient_m_per_w * power_in
    broadening = 1.0 + power_in / tn.tpa_power_w
    absorptive = 1.0 + tn.tpa_loss_fraction * power_in / tn.tpa_power_w

    centers = cold_centers(ring)
    fwhms = cold_fwhms(ring)
    hot = {}
    for which in RESONANCES:
        cold_wavelength = TWO_PI_C / centers[which]
        hot[f"{which}_center"] = centers[which] / (1.0 + shift / cold_wavelength)
        hot[f"{which}_fwhm"] = fwhms[which] * broadening

    return HotRingState(power_in_w=float(power_in),
                        drop_peak_factor=1.0 / absorptive ** 2,
                        **hot)


def cold_state(ring: RingParams) -> HotRingState:
    """The ring at zero power"""
    return hot_state(ring, ThermalNonlinearParams(), 0.0)


def redshift(ring: RingParams, hot: HotRingState, which: str = "pump") -> float:
    """Wavelength shift of one resonance relative to the cold ring, meters"""
    cold = cold_centers(ring)[which]
    return TWO_PI_C / getattr(hot, f"{which}_center") - TWO_PI_C / cold


def field_enhancement(omega: ArrayLike, which: str, hot: HotRingState) -> ArrayLike:
    """Complex Lorentzian field factor of the selected hot resonance"""
    if which not in RESONANCES:
        raise DomainError(f"unknown resonance {which!r}; expected one of {RESONANCES}")
    return lorentzian_amplitude(omega, hot.line(which))


def port_transmission(omega: ArrayLike, port: str, hot: HotRingState,
                      ring: RingParams) -> ArrayLike:
    """Power transmission Input->Through or Input->Drop

    The through port dips to the critical-coupling extinction on every
    resonance; the drop port peaks at the Input->Drop budget scaled by the
    absorptive TPA factor.
    """
    enhancements = [np.abs(field_enhancement(omega, which, hot)) ** 2 for which in RESONANCES]
    if port == "through":
        floor = 10 ** (-ring.through_extinction_db / 10)
        result = np.ones_like(enhancements[0])
        for power in enhancements:
            result = result * (1.0 - (1.0 - floor) * power)
        return result
    if port == "drop":
        peak = 10 ** (-ring.drop_loss_db / 10) * hot.drop_peak_factor
        return peak * np.sum(enhancements, axis=0)
    raise DomainError(f"unknown port {port!r}; expected 'through' or 'drop'")


def describe(hot: HotRingState) -> Tuple[float, float]:
    """Pump center wavelength and FWHM in meters, for reports"""
    center = TWO_PI_C / hot.pump_center
    fwhm = hot.pump_fwhm * center ** 2 / TWO_PI_C
    return center, fwhm
