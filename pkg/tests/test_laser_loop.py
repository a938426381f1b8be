from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import brentq

from src.models.laser_loop import (
    calibrate_gain,
    emission_fwhm,
    emission_fwhm_wavelength,
    lasing_curve,
    linear_fit,
    lorentzian_pump,
    pump_spectrum,
    rigrod_power,
    single_mode_pump,
    small_signal_gain,
    solve_steady_state,
    steady_state_at_power,
)
from src.models.ring import field_enhancement, hot_state
from src.schema.data_models import LoopParams, RingParams, ThermalNonlinearParams
from src.tools.scheduler import Scheduler
from src.utils.errors import DomainError, SolverError

INERT = ThermalNonlinearParams(shift_coefficient_m_per_w=0.0, tpa_power_w=np.inf,
                               tpa_loss_fraction=0.0)


@pytest.mark.parametrize("law", ["linear", "db_linear"])
def test_gain_reaches_unity_round_trip_at_threshold(loop, law):
    calibrated = replace(loop, gain_law=law)
    gain = small_signal_gain(calibrated.threshold_current_ma, calibrated)
    assert gain * calibrated.round_trip_transmission == pytest.approx(1.0, rel=1e-9)


def test_linear_gain_coefficients(loop):
    g1, i0 = calibrate_gain(loop)
    assert g1 == pytest.approx(0.14275, rel=1e-3)
    assert i0 == pytest.approx(-7.87, abs=0.05)


def test_unknown_gain_law_rejected(loop):
    with pytest.raises(DomainError):
        calibrate_gain(replace(loop, gain_law="cubic"))


def test_negative_current_rejected(loop):
    with pytest.raises(DomainError):
        small_signal_gain(-1.0, loop)


def test_rigrod_zero_below_threshold(loop):
    assert rigrod_power(50.0, loop) == 0.0


def test_rigrod_ring_input_power_at_90_ma(loop):
    assert loop.ring_input_factor * rigrod_power(90.0, loop) == pytest.approx(1.109e-3, rel=2e-3)


def test_rigrod_slope_is_constant_above_threshold(loop):
    powers = [rigrod_power(current, loop) for current in (80.0, 90.0, 100.0, 110.0)]
    steps = np.diff(powers)
    np.testing.assert_allclose(steps, steps[0], rtol=1e-9)


def test_db_linear_slope_at_threshold(loop):
    calibrated = replace(loop, gain_law="db_linear")
    current = calibrated.threshold_current_ma
    scale = calibrated.ring_input_factor
    slope = scale * (rigrod_power(current + 0.01, calibrated) - rigrod_power(current, calibrated)) / 0.01
    expected = calibrated.slope_efficiency_w_per_ma * calibrated.monitor_factor
    assert slope == pytest.approx(expected, rel=1e-3)


def test_decoupled_ring_reproduces_rigrod(loop, ring):
    state = solve_steady_state(90.0, loop, ring, INERT)
    assert state.power_in_w == pytest.approx(loop.ring_input_factor * rigrod_power(90.0, loop),
                                             rel=1e-12)
    assert state.above_threshold


def test_below_threshold_state(loop, ring, thermal):
    state = solve_steady_state(60.0, loop, ring, thermal)
    assert not state.above_threshold
    assert state.power_in_w == 0.0
    assert state.net_gain < 1.0


def _residual(power, current, loop, ring, thermal):
    hot = hot_state(ring, thermal, power)
    response = hot.drop_peak_factor * abs(field_enhancement(hot.pump_center, "pump", hot)) ** 2
    gain = small_signal_gain(current, loop) * loop.round_trip_transmission
    return loop.ring_input_factor * loop.saturation_power_w * (gain * response - 1.0) - power


def test_fixed_point_is_self_consistent(loop, ring, thermal):
    state = solve_steady_state(105.0, loop, ring, thermal)
    residual = _residual(state.power_in_w, 105.0, loop, ring, thermal)
    assert abs(residual) / state.power_in_w < 1e-5
    assert state.net_gain == pytest.approx(
        1.0 + state.power_in_w / (loop.ring_input_factor * loop.saturation_power_w), rel=1e-5)


def test_solver_matches_bracketed_root(loop, ring, thermal):
    current = 100.0
    upper = loop.ring_input_factor * rigrod_power(current, loop)
    root = brentq(_residual, 1e-9, upper, args=(current, loop, ring, thermal), xtol=1e-15)
    state = solve_steady_state(current, loop, ring, thermal)
    assert state.power_in_w == pytest.approx(root, rel=1e-5)
    assert state.power_in_w < upper


def test_solver_reports_non_convergence(loop, ring, thermal):
    with pytest.raises(SolverError) as info:
        solve_steady_state(100.0, replace(loop, max_iterations=1), ring, thermal)
    assert info.value.last_iterate > 0


def test_inverse_recovers_target_power(loop, ring, thermal):
    target = steady_state_at_power(1.2e-3, loop, ring, thermal)
    solved = solve_steady_state(target.current_ma, loop, ring, thermal)
    assert solved.power_in_w == pytest.approx(1.2e-3, rel=1e-5)
    assert target.net_gain == pytest.approx(solved.net_gain, rel=1e-5)


def test_inverse_rejects_zero_power(loop, ring, thermal):
    with pytest.raises(DomainError):
        steady_state_at_power(0.0, loop, ring, thermal)


@pytest.fixture(scope="module")
def curve():
    currents = np.arange(60.0, 121.0, 1.0)
    return lasing_curve(currents, LoopParams(), RingParams(), ThermalNonlinearParams(),
                        scheduler=Scheduler(max_workers=2))


def test_lasing_curve_columns(curve):
    assert list(curve.columns) == ["current_mA", "P_PM_W", "P_in_W", "shift_pm", "fwhm_pm"]
    assert len(curve) == 61


def test_lasing_curve_fit_matches_calibration(curve):
    fit = linear_fit(curve, (72.0, 95.0))
    assert fit["threshold_ma"] == pytest.approx(70.4, abs=0.5)
    assert fit["slope_w_per_ma"] == pytest.approx(100.1e-9, rel=0.02)


def test_lasing_curve_rolls_off_at_high_current(curve):
    fit = linear_fit(curve, (72.0, 95.0))
    line = lambda current: fit["slope_w_per_ma"] * (current - fit["threshold_ma"])
    at = curve.set_index("current_mA")["P_PM_W"]
    assert at[110.0] < line(110.0)
    assert at[100.0] > 0.9 * line(100.0)


def test_lasing_curve_is_monotone_and_redshifts(curve):
    assert np.all(np.diff(curve["P_in_W"].to_numpy()) >= 0)
    assert np.all(np.diff(curve["shift_pm"].to_numpy()) >= 0)
    assert curve["P_PM_W"].iloc[0] == 0.0


def test_lasing_curve_rejects_unordered_currents(loop, ring, thermal):
    with pytest.raises(DomainError):
        lasing_curve([80.0, 75.0, 90.0], loop, ring, thermal)


def test_pump_spectrum_power_and_support(loop, ring, thermal):
    state = steady_state_at_power(1.5e-3, loop, ring, thermal)
    pump = pump_spectrum(state, loop, seed=3)
    assert pump.mode_powers.sum() == pytest.approx(1.5e-3, rel=1e-12)
    gain = state.net_gain * np.abs(field_enhancement(pump.grid.points, "pump", state.hot)) ** 2
    active = pump.mode_powers > 0
    assert np.all(gain[active] >= 1.0)
    assert np.all(gain[~active] < 1.0)


def test_pump_spectrum_narrow_just_above_threshold(loop, ring, thermal):
    state = solve_steady_state(72.0, loop, ring, thermal)
    pump = pump_spectrum(state, loop, seed=1)
    assert emission_fwhm_wavelength(pump) < 15e-12


def test_pump_spectrum_comparable_to_ring_linewidth_at_full_power(loop, ring, thermal):
    state = steady_state_at_power(2.19e-3, loop, ring, thermal)
    pump = pump_spectrum(state, loop, seed=1)
    assert 50e-12 <= emission_fwhm_wavelength(pump) <= 90e-12


def test_pump_spectrum_broadens_with_power(loop, ring, thermal):
    widths = []
    for power in (0.1e-3, 0.5e-3, 1.0e-3, 1.5e-3, 2.19e-3):
        state = steady_state_at_power(power, loop, ring, thermal)
        widths.append(emission_fwhm(pump_spectrum(state, loop, seed=0)))
    assert np.all(np.diff(widths) > 0)


def test_pump_spectrum_seed_determinism(loop, ring, thermal):
    state = steady_state_at_power(1.0e-3, loop, ring, thermal)
    first = pump_spectrum(state, loop, seed=42)
    second = pump_spectrum(state, loop, seed=42)
    other = pump_spectrum(state, loop, seed=43)
    np.testing.assert_array_equal(first.amplitudes, second.amplitudes)
    assert not np.array_equal(first.amplitudes, other.amplitudes)
    np.testing.assert_allclose(first.mode_powers, other.mode_powers)


def test_coherent_pump_has_flat_phase(loop, ring, thermal):
    state = steady_state_at_power(1.0e-3, loop, ring, thermal)
    pump = pump_spectrum(state, loop, phase_model="coherent")
    assert np.all(pump.amplitudes.imag == 0)
    assert np.all(pump.amplitudes.real >= 0)


def test_pump_spectrum_requires_lasing(loop, ring, thermal):
    state = solve_steady_state(50.0, loop, ring, thermal)
    with pytest.raises(SolverError):
        pump_spectrum(state, loop)


def test_pump_spectrum_rejects_even_mode_count(loop, ring, thermal):
    state = steady_state_at_power(1.0e-3, loop, ring, thermal)
    with pytest.raises(DomainError):
        pump_spectrum(state, loop, n_modes_out=4000)


def test_single_mode_pump():
    pump = single_mode_pump(1.2e15, 1e-3, 1e7)
    assert pump.n_active == 1
    assert pump.mode_powers.sum() == pytest.approx(1e-3)
    assert emission_fwhm(pump) == pytest.approx(1e7)


def test_lorentzian_pump_normalization():
    pump = lorentzian_pump(1.2e15, 5e10, 2e-3, 5e7, 2001)
    assert pump.mode_powers.sum() == pytest.approx(2e-3, rel=1e-12)
    assert emission_fwhm(pump) == pytest.approx(5e10, rel=0.01)
