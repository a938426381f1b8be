from dataclasses import replace

import numpy as np
import pytest

from src.experiments.jsd_runner import build_jsa, resonance_grid, theory_pump
from src.models.biphoton import joint_spectral_amplitude
from src.models.laser_loop import lorentzian_pump
from src.models.schmidt import (
    entanglement_entropy,
    purity,
    schmidt_decompose,
    schmidt_number,
)
from src.models.spectral import angular_frequency_to_wavelength, wavelength_span_to_angular
from src.schema.data_models import JointSpectralAmplitude, SchmidtSpectrum
from src.tools.scheduler import Scheduler
from src.utils.errors import AnalysisError, ConfigError


def test_product_state_has_single_mode():
    matrix = np.outer([1.0, 2.0, 0.5], [0.3j, 1.0, -1.0, 0.2])
    spectrum = schmidt_decompose(matrix)
    np.testing.assert_allclose(spectrum.coefficients, [1.0])
    assert schmidt_number(spectrum) == pytest.approx(1.0)
    assert entanglement_entropy(spectrum) == pytest.approx(0.0, abs=1e-12)


def test_two_orthogonal_products_give_two_equal_modes():
    matrix = np.outer([1, 0, 0], [0, 1, 0, 0]) + np.outer([0, 0, 1], [0, 0, 0, 1])
    spectrum = schmidt_decompose(matrix.astype(complex))
    np.testing.assert_allclose(spectrum.coefficients, [0.5, 0.5])
    assert schmidt_number(spectrum) == pytest.approx(2.0)
    assert entanglement_entropy(spectrum) == pytest.approx(1.0)


def test_coefficients_match_reduced_density_matrix():
    rng = np.random.default_rng(11)
    matrix = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    reduced = matrix @ matrix.conj().T
    eigenvalues = np.sort(np.linalg.eigvalsh(reduced))[::-1]
    spectrum = schmidt_decompose(matrix)
    np.testing.assert_allclose(spectrum.coefficients, eigenvalues / eigenvalues.sum(), rtol=1e-10)
    assert spectrum.coefficients.sum() == pytest.approx(1.0, rel=1e-12)
    assert np.all(np.diff(spectrum.coefficients) <= 0)


def test_entropy_of_known_spectrum():
    spectrum = schmidt_decompose(np.diag(np.sqrt([0.7, 0.2, 0.1])))
    assert entanglement_entropy(spectrum) == pytest.approx(1.1568, abs=1e-4)
    assert purity(spectrum) == pytest.approx(1.0 / schmidt_number(spectrum))


def test_invariant_under_scaling_and_permutation():
    rng = np.random.default_rng(5)
    matrix = rng.normal(size=(6, 5)) + 1j * rng.normal(size=(6, 5))
    reference = schmidt_decompose(matrix).coefficients
    scaled = schmidt_decompose((3.0 - 2.0j) * matrix).coefficients
    permuted = schmidt_decompose(matrix[rng.permutation(6)][:, rng.permutation(5)]).coefficients
    np.testing.assert_allclose(scaled, reference, rtol=1e-10)
    np.testing.assert_allclose(permuted, reference, rtol=1e-10)


def test_jsa_cell_area_does_not_change_coefficients(cold_ring):
    rng = np.random.default_rng(2)
    matrix = rng.normal(size=(4, 3)) + 0j
    signal = resonance_grid(cold_ring.signal_center, 1e-12, 4)
    idler = resonance_grid(cold_ring.idler_center, 2e-12, 3)
    jsa = JointSpectralAmplitude(signal_grid=signal, idler_grid=idler, amplitudes=matrix)
    np.testing.assert_allclose(schmidt_decompose(jsa).coefficients,
                               schmidt_decompose(matrix).coefficients, rtol=1e-10)


def test_truncation_drops_negligible_modes():
    spectrum = schmidt_decompose(np.diag([1.0, 1e-3, 1e-9]), truncation=1e-12)
    assert spectrum.coefficients.size == 2
    assert spectrum.coefficients.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("matrix", [np.zeros((3, 3)), np.ones(4), np.full((2, 2), np.nan)])
def test_degenerate_input_rejected(matrix):
    with pytest.raises(AnalysisError):
        schmidt_decompose(matrix)


def test_entropy_of_pure_mode_is_zero():
    assert entanglement_entropy(SchmidtSpectrum(coefficients=np.array([1.0]))) == 0.0


def _lorentzian_k(hot, width_m):
    wavelength = angular_frequency_to_wavelength(hot.pump_center)
    width = wavelength_span_to_angular(width_m, wavelength)
    spacing = wavelength_span_to_angular(0.2e-12, wavelength)
    pump = lorentzian_pump(hot.pump_center, width, 1e-3, spacing, 8001)
    signal = resonance_grid(hot.signal_center, 2e-12, 81)
    idler = resonance_grid(hot.idler_center, 2e-12, 81)
    return schmidt_number(schmidt_decompose(joint_spectral_amplitude(pump, hot, signal, idler)))


def test_broader_pump_gives_fewer_modes(cold_ring):
    values = [_lorentzian_k(cold_ring, width) for width in (10e-12, 20e-12, 40e-12, 80e-12)]
    assert np.all(np.diff(values) < 0)
    assert values[-1] >= 1.0


def test_random_phase_theory_pump_needs_a_seed(scenario):
    randomized = replace(scenario, biphoton=replace(scenario.biphoton, theory_phase_model="random"))
    with pytest.raises(ConfigError):
        theory_pump(2e-3, randomized)


@pytest.mark.slow
def test_schmidt_number_falls_with_pump_power(scenario):
    scheduler = Scheduler(max_workers=4)
    values = []
    for power in scenario.biphoton.theory_powers_w:
        jsa, _, _ = build_jsa(power, scenario, scheduler)
        values.append(schmidt_number(schmidt_decompose(jsa)))
    assert np.all(np.diff(values) < 0)
    assert 1.3 <= values[0] / values[-1] <= 1.6


@pytest.mark.slow
def test_schmidt_number_converges_with_grid(scenario):
    refined = replace(scenario, biphoton=replace(scenario.biphoton, signal_points=801,
                                                 signal_step_m=0.5e-12, idler_points=401,
                                                 idler_step_m=1e-12))
    scheduler = Scheduler(max_workers=4)
    power = scenario.biphoton.theory_powers_w[0]
    coarse, _, _ = build_jsa(power, scenario, scheduler)
    fine, _, _ = build_jsa(power, refined, scheduler)
    k_coarse = schmidt_number(schmidt_decompose(coarse))
    k_fine = schmidt_number(schmidt_decompose(fine))
    assert abs(k_coarse - k_fine) / k_fine < 0.02
