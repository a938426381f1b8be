"""
Spontaneous four-wave mixing in the ring: biphoton wavefunction and pair rate

The pump is a discrete comb, so energy conservation pairs comb modes whose
frequencies sum to omega_s + omega_i. Pair sums are averaged over an energy
window as wide as the coarsest of the signal step, idler step and comb spacing.
"""

import logging
from typing import Callable, Optional

import numpy as np
from scipy.signal import fftconvolve

from src.models.laser_loop import pump_spectrum
from src.models.ring import field_enhancement
from src.schema.data_models import (
    HotRingState,
    JointSpectralAmplitude,
    LasingState,
    LoopParams,
    PumpSpectrum,
    SpectralGrid,
)
from src.tools.scheduler import Scheduler
from src.utils.errors import AnalysisError, DomainError

logger = logging.getLogger(__name__)

MIN_RESONANCE_OVERLAP = 1e-3


def _grid_offsets(grid: SpectralGrid, reference: float) -> np.ndarray:
    """Grid points relative to ``reference`` without cancelling large absolute values"""
    relative = (np.arange(grid.n_points) - (grid.n_points - 1) / 2) * grid.step
    return (grid.center - reference) + relative


def _pair_sum_function(pump: PumpSpectrum, hot: HotRingState,
                       bin_width: float) -> Callable[[np.ndarray], np.ndarray]:
    """Sum-frequency function beta(S), S given as offset from twice the comb center

    beta is the comb autoconvolution of alpha_m F_p(omega_m). Each pair sum
    occupies one comb cell; beta(S) averages that density over an energy
    window of width bin_width centered on S.
    """
    weighted = pump.amplitudes * field_enhancement(pump.grid.points, "pump", hot)
    active = np.flatnonzero(np.abs(weighted) > 0)
    if active.size == 0:
        raise AnalysisError("pump spectrum has no active modes")
    low, high = active[0], active[-1]
    trimmed = weighted[low:high + 1]

    step = pump.grid.step
    pair_sums = fftconvolve(trimmed, trimmed) * step
    first = (2 * low - (pump.grid.n_points - 1)) * step
    edges = first - step / 2 + np.arange(pair_sums.size + 1) * step
    cumulative = np.concatenate(([0.0 + 0.0j], np.cumsum(pair_sums)))
    total = cumulative[-1]

    def integral(x: np.ndarray) -> np.ndarray:
        real = np.interp(x, edges, cumulative.real, left=0.0, right=total.real)
        imag = np.interp(x, edges, cumulative.imag, left=0.0, right=total.imag)
        return real + 1j * imag

    def beta(sum_offsets: np.ndarray) -> np.ndarray:
        sums = np.asarray(sum_offsets, dtype=float)
        window = integral(sums + bin_width / 2) - integral(sums - bin_width / 2)
        return window * step / bin_width

    return beta


class _Kernel:
    """Unnormalized phi(omega_s, omega_i) shared by the JSA and stimulated FWM"""

    def __init__(self, pump: PumpSpectrum, hot: HotRingState,
                 signal_grid: SpectralGrid, idler_grid: SpectralGrid):
        self.hot = hot
        self.reference = pump.grid.center
        self.signal_grid = signal_grid
        self.idler_grid = idler_grid

        self.signal_field = field_enhancement(signal_grid.points, "signal", hot)
        self.idler_field = field_enhancement(idler_grid.points, "idler", hot)
        if (np.max(np.abs(self.signal_field)) < MIN_RESONANCE_OVERLAP
                or np.max(np.abs(self.idler_field)) < MIN_RESONANCE_OVERLAP):
            raise AnalysisError("signal/idler grids do not overlap the hot resonances")

        self.signal_offsets = _grid_offsets(signal_grid, self.reference)
        self.idler_offsets = _grid_offsets(idler_grid, self.reference)
        bin_width = max(signal_grid.step, idler_grid.step, pump.grid.step)
        self.beta = _pair_sum_function(pump, hot, bin_width)

    def row(self, index: int) -> np.ndarray:
        sums = self.signal_offsets[index] + self.idler_offsets
        return self.signal_field[index] * self.idler_field * self.beta(sums)

    def row_at(self, omega_s: float) -> np.ndarray:
        signal_field = field_enhancement(omega_s, "signal", self.hot)
        sums = (omega_s - self.reference) + self.idler_offsets
        return signal_field * self.idler_field * self.beta(sums)

    def matrix(self, scheduler: Scheduler) -> np.ndarray:
        rows = scheduler.map_ordered(self.row, range(self.signal_grid.n_points))
        return np.vstack(rows)


def joint_spectral_amplitude(pump: PumpSpectrum, hot: HotRingState,
                             signal_grid: SpectralGrid, idler_grid: SpectralGrid,
                             scheduler: Optional[Scheduler] = None) -> JointSpectralAmplitude:
    """Normalized JSA: sum |phi|^2 * cell area == 1"""
    kernel = _Kernel(pump, hot, signal_grid, idler_grid)
    amplitudes = kernel.matrix(scheduler or Scheduler())

    norm = np.sum(np.abs(amplitudes) ** 2) * signal_grid.step * idler_grid.step
    if norm <= 0:
        raise AnalysisError("no energy-conserving pump pairs fall on the signal/idler grids")
    amplitudes = amplitudes / np.sqrt(norm)
    logger.debug(f"JSA {amplitudes.shape[0]}x{amplitudes.shape[1]} built, norm {norm:.4e}")
    return JointSpectralAmplitude(signal_grid=signal_grid, idler_grid=idler_grid,
                                  amplitudes=amplitudes, normalized=True)


def jsd(jsa: JointSpectralAmplitude) -> np.ndarray:
    """Joint spectral density |phi|^2 with unit sum times cell area"""
    density = np.abs(jsa.amplitudes) ** 2
    total = density.sum() * jsa.cell_area
    if total <= 0:
        raise AnalysisError("joint spectral amplitude is identically zero")
    return density / total


def stimulated_idler_spectrum(seed_omega: float, pump: PumpSpectrum, hot: HotRingState,
                              idler_grid: SpectralGrid,
                              signal_grid: SpectralGrid) -> np.ndarray:
    """Idler power spectrum generated by stimulated FWM with a CW seed at ``seed_omega``

    Uses the same kernel as joint_spectral_amplitude, so stacking seeds over
    the signal grid reproduces the JSD up to one constant.
    """
    if not signal_grid.contains(seed_omega):
        raise DomainError(f"seed {seed_omega:.6e} rad/s lies outside the signal grid")
    kernel = _Kernel(pump, hot, signal_grid, idler_grid)
    return np.abs(kernel.row_at(seed_omega)) ** 2


def pump_spectral_overlap(pump: PumpSpectrum, hot: HotRingState) -> float:
    """Fraction of comb power that falls inside the hot pump resonance, in (0, 1]"""
    enhancement = np.abs(field_enhancement(pump.grid.points, "pump", hot)) ** 2
    return float(np.sum(pump.mode_powers * enhancement) / pump.mode_powers.sum())


def pair_generation_rate(state: LasingState, loop: LoopParams, kappa: float,
                         n_modes_out: int = 4001) -> float:
    """Internal pair rate R = kappa (P_in eta_overlap)^2, zero below threshold"""
    if kappa < 0:
        raise DomainError(f"rate constant must be non-negative, got {kappa}")
    if not state.above_threshold or state.power_in_w <= 0:
        return 0.0
    pump = pump_spectrum(state, loop, n_modes_out=n_modes_out, phase_model="coherent")
    effective = state.power_in_w * pump_spectral_overlap(pump, state.hot)
    return kappa * effective ** 2
