"""
Fiber-loop laser filtered by the microring

Steady state of the loop (saturable amplifier + lossy round trip + ring drop
filter), the thermal feedback between circulating power and the resonance it
lases on, and the multimode comb the loop emits.
"""

import logging
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.signal import peak_widths
from scipy.stats import linregress

from src.models.ring import field_enhancement, hot_state, redshift
from src.models.spectral import (
    angular_frequency_to_wavelength,
    angular_span_to_wavelength,
    make_grid,
    wavelength_span_to_angular,
)
from src.schema.data_models import (
    HotRingState,
    LasingState,
    LoopParams,
    PumpSpectrum,
    RingParams,
    ThermalNonlinearParams,
)
from src.tools.scheduler import Scheduler, is_monotone
from src.utils.errors import DomainError, SolverError

logger = logging.getLogger(__name__)

GAIN_LAWS = ("linear", "db_linear")
PHASE_MODELS = ("random", "coherent")
LASING_CURVE_COLUMNS = ["current_mA", "P_PM_W", "P_in_W", "shift_pm", "fwhm_pm"]


def _ring_input_scale(loop: LoopParams) -> float:
    """Ring input power per unit of (G0*T - 1): C * P_sat"""
    return loop.ring_input_factor * loop.saturation_power_w


def calibrate_gain(loop: LoopParams) -> Tuple[float, float]:
    """Gain-law coefficients (g1, I0) reproducing threshold and slope efficiency

    The slope efficiency is given at the power monitor; the ring sees
    ``monitor_factor`` times more. For the linear law g1 is per mA, for the
    dB-linear law it is dB per mA.
    """
    if loop.gain_law not in GAIN_LAWS:
        raise DomainError(f"unknown gain law {loop.gain_law!r}; expected one of {GAIN_LAWS}")
    if not 0 < loop.round_trip_transmission < 1:
        raise DomainError(
            f"round-trip transmission must lie in (0, 1), got {loop.round_trip_transmission}")
    slope_in = loop.slope_efficiency_w_per_ma * loop.monitor_factor
    scale = _ring_input_scale(loop)
    if slope_in <= 0 or scale <= 0:
        raise DomainError("slope efficiency, ring input factor and saturation power must be positive")

    transmission = loop.round_trip_transmission
    if loop.gain_law == "linear":
        g1 = slope_in / (scale * transmission)
        i0 = loop.threshold_current_ma - 1.0 / (g1 * transmission)
    else:
        g1 = slope_in / (scale * np.log(10) / 10)
        i0 = loop.threshold_current_ma - 10 * np.log10(1.0 / transmission) / g1
    return float(g1), float(i0)


def small_signal_gain(current_ma: float, loop: LoopParams) -> float:
    """Unsaturated single-pass amplifier gain G0(I), linear units"""
    if current_ma < 0 or not np.isfinite(current_ma):
        raise DomainError(f"current must be non-negative, got {current_ma}")
    g1, i0 = calibrate_gain(loop)
    if loop.gain_law == "linear":
        return max(g1 * (current_ma - i0), 0.0)
    return float(10 ** (g1 * (current_ma - i0) / 10))


def rigrod_power(current_ma: float, loop: LoopParams) -> float:
    """Saturated loop power for a cold, lossless-filter ring: P_sat (G0 T - 1), clipped at 0"""
    gain = small_signal_gain(current_ma, loop)
    return max(loop.saturation_power_w * (gain * loop.round_trip_transmission - 1.0), 0.0)


def _filter_response(power_in: float, ring: RingParams,
                     tn: ThermalNonlinearParams) -> Tuple[float, HotRingState]:
    hot = hot_state(ring, tn, power_in)
    enhancement = np.abs(field_enhancement(hot.pump_center, "pump", hot)) ** 2
    return hot.drop_peak_factor * float(enhancement), hot


def solve_steady_state(current_ma: float, loop: LoopParams, ring: RingParams,
                       tn: ThermalNonlinearParams) -> LasingState:
    """Self-consistent ring input power at one supply current

    The loop lases at the hot pump center. Each iteration recomputes the
    effective round-trip transmission for the current power and damps the
    update; convergence is on the relative change of P_in.
    """
    gain = small_signal_gain(current_ma, loop)
    scale = _ring_input_scale(loop)
    cold_loop_gain = gain * loop.round_trip_transmission

    if cold_loop_gain <= 1.0:
        hot = hot_state(ring, tn, 0.0)
        return LasingState(current_ma=float(current_ma), power_in_w=0.0,
                           lasing_center=hot.pump_center, hot=hot,
                           above_threshold=False, net_gain=float(cold_loop_gain))

    power = scale * (cold_loop_gain - 1.0)
    for iteration in range(1, loop.max_iterations + 1):
        response, _ = _filter_response(power, ring, tn)
        target = scale * max(cold_loop_gain * response - 1.0, 0.0)
        updated = (1.0 - loop.damping) * power + loop.damping * target
        logger.debug(f"I={current_ma:.3f} mA iteration {iteration}: P_in={updated:.6e} W")

        change = abs(updated - power)
        power = updated
        if change <= loop.tolerance * max(power, np.finfo(float).tiny):
            break
    else:
        raise SolverError(f"steady state did not converge at I={current_ma} mA "
                          f"after {loop.max_iterations} iterations", last_iterate=power)

    response, hot = _filter_response(power, ring, tn)
    return LasingState(current_ma=float(current_ma), power_in_w=float(power),
                       lasing_center=hot.pump_center, hot=hot,
                       above_threshold=power > 0.0,
                       net_gain=float(cold_loop_gain * response),
                       iterations=iteration)


def steady_state_at_power(power_in: float, loop: LoopParams, ring: RingParams,
                          tn: ThermalNonlinearParams) -> LasingState:
    """Closed-form inverse of solve_steady_state: the current giving ``power_in``"""
    if power_in <= 0 or not np.isfinite(power_in):
        raise DomainError(f"target ring input power must be positive, got {power_in}")
    g1, i0 = calibrate_gain(loop)
    response, hot = _filter_response(power_in, ring, tn)
    net_gain = 1.0 + power_in / _ring_input_scale(loop)
    gain = net_gain / (response * loop.round_trip_transmission)

    if loop.gain_law == "linear":
        current = i0 + gain / g1
    else:
        current = i0 + 10 * np.log10(gain) / g1

    return LasingState(current_ma=float(current), power_in_w=float(power_in),
                       lasing_center=hot.pump_center, hot=hot,
                       above_threshold=True, net_gain=float(net_gain))


def pump_spectrum(state: LasingState, loop: LoopParams, n_modes_out: int = 4001,
                  seed: Optional[Union[int, np.random.SeedSequence]] = None,
                  phase_model: str = "random") -> PumpSpectrum:
    """Comb of loop modes with net round-trip gain >= 1 around the lasing peak

    Active modes are weighted by |F|^(2 beta) and normalized so that the total
    comb power equals P_in.
    """
    if phase_model not in PHASE_MODELS:
        raise DomainError(f"unknown phase model {phase_model!r}; expected one of {PHASE_MODELS}")
    if int(n_modes_out) != n_modes_out or n_modes_out < 3 or n_modes_out % 2 == 0:
        raise DomainError(f"n_modes_out must be an odd integer >= 3, got {n_modes_out}")
    if not state.above_threshold or state.power_in_w <= 0:
        raise SolverError(f"no lasing modes at I={state.current_ma} mA: the loop is below threshold")

    center_wavelength = angular_frequency_to_wavelength(state.lasing_center)
    spacing = wavelength_span_to_angular(loop.mode_spacing_m, center_wavelength)
    grid = make_grid(state.lasing_center, spacing * (n_modes_out - 1), int(n_modes_out))

    enhancement = np.abs(field_enhancement(grid.points, "pump", state.hot)) ** 2
    active = state.net_gain * enhancement >= 1.0
    if not np.any(active):
        raise SolverError("empty pump spectrum: no loop mode reaches unit round-trip gain")
    if active[0] or active[-1]:
        logger.warning(f"lasing window exceeds the {n_modes_out}-mode output grid; "
                       "outer modes are dropped")

    weights = np.where(active, enhancement ** loop.weight_exponent, 0.0)
    powers = state.power_in_w * weights / weights.sum()

    if phase_model == "random":
        phases = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, grid.n_points)
    else:
        phases = np.zeros(grid.n_points)
    amplitudes = np.sqrt(powers / spacing) * np.exp(1j * phases)

    logger.debug(f"pump spectrum at P_in={state.power_in_w:.4e} W: "
                 f"{int(active.sum())} active modes")
    return PumpSpectrum(grid=grid, amplitudes=amplitudes, total_power_w=state.power_in_w)


def single_mode_pump(omega: float, power: float, spacing: float) -> PumpSpectrum:
    """Monochromatic pump: one active mode at ``omega``"""
    if power <= 0:
        raise DomainError(f"pump power must be positive, got {power}")
    grid = make_grid(omega, 2 * spacing, 3)
    amplitudes = np.zeros(3, dtype=complex)
    amplitudes[1] = np.sqrt(power / grid.step)
    return PumpSpectrum(grid=grid, amplitudes=amplitudes, total_power_w=float(power))


def lorentzian_pump(center: float, fwhm: float, power: float, spacing: float,
                    n_modes: int, phases: Optional[np.ndarray] = None) -> PumpSpectrum:
    """Comb with a Lorentzian power envelope, zero phases unless given"""
    if power <= 0 or fwhm <= 0:
        raise DomainError("pump power and fwhm must be positive")
    grid = make_grid(center, spacing * (n_modes - 1), n_modes)
    weights = 1.0 / (1.0 + (2 * (grid.points - center) / fwhm) ** 2)
    powers = power * weights / weights.sum()
    phase = np.zeros(n_modes) if phases is None else np.asarray(phases, dtype=float)
    amplitudes = np.sqrt(powers / grid.step) * np.exp(1j * phase)
    return PumpSpectrum(grid=grid, amplitudes=amplitudes, total_power_w=float(power))


def emission_fwhm(pump: PumpSpectrum) -> float:
    """Full width at half maximum of the per-mode power, rad/s"""
    powers = pump.mode_powers
    peak = int(np.argmax(powers))
    # measure from zero, not from the lowest in-grid sample
    prominence = (np.array([powers[peak]]), np.array([0]), np.array([powers.size - 1]))
    widths, _, _, _ = peak_widths(powers, [peak], rel_height=0.5, prominence_data=prominence)
    return float(widths[0] * pump.grid.step)


def emission_fwhm_wavelength(pump: PumpSpectrum) -> float:
    return angular_span_to_wavelength(emission_fwhm(pump), pump.grid.center)


def lasing_curve(currents: Iterable[float], loop: LoopParams, ring: RingParams,
                 tn: ThermalNonlinearParams,
                 scheduler: Optional[Scheduler] = None) -> pd.DataFrame:
    """Sweep the supply current; one row per point in LASING_CURVE_COLUMNS"""
    currents = [float(current) for current in currents]
    if not currents:
        raise DomainError("current sweep is empty")
    if len(currents) > 1 and not is_monotone(currents):
        raise DomainError("current sweep must be strictly monotone")

    scheduler = scheduler or Scheduler()
    states = scheduler.map_ordered(
        lambda current: solve_steady_state(current, loop, ring, tn), currents)

    rows = []
    for state in states:
        _, fwhm = _pump_line_wavelength(state)
        rows.append({
            "current_mA": state.current_ma,
            "P_PM_W": state.power_in_w / loop.monitor_factor,
            "P_in_W": state.power_in_w,
            "shift_pm": redshift(ring, state.hot) * 1e12,
            "fwhm_pm": fwhm * 1e12,
        })
    logger.info(f"lasing curve: {len(rows)} points from {currents[0]} to {currents[-1]} mA")
    return pd.DataFrame(rows, columns=LASING_CURVE_COLUMNS)


def _pump_line_wavelength(state: LasingState) -> Tuple[float, float]:
    center = angular_frequency_to_wavelength(state.hot.pump_center)
    return center, angular_span_to_wavelength(state.hot.pump_fwhm, state.hot.pump_center)


def linear_fit(curve: pd.DataFrame, window: Tuple[float, float]) -> Dict[str, float]:
    """Least-squares line through the monitor power inside ``window`` (mA)

    Returns the threshold (mA) where the line crosses zero and the slope in
    W/mA at the power monitor.
    """
    low, high = window
    inside = curve[(curve["current_mA"] >= low) & (curve["current_mA"] <= high)
                   & (curve["P_PM_W"] > 0)]
    if len(inside) < 2:
        raise DomainError(f"fewer than two lasing points inside the fit window {window}")
    fit = linregress(inside["current_mA"].to_numpy(), inside["P_PM_W"].to_numpy())
    return {
        "slope_w_per_ma": float(fit.slope),
        "threshold_ma": float(-fit.intercept / fit.slope),
        "r_value": float(fit.rvalue),
    }
