"""
Data models for the self-pumped microring simulator

All quantities are SI unless a field name says otherwise (``_ma`` for mA,
``_db`` for decibels). Spectral positions are angular frequencies in rad/s.
"""

from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

import numpy as np

# Float aliases for readability; values are meters and rad/s.
Wavelength = float
AngularFrequency = float

RESONANCES = ("pump", "signal", "idler")


def _plain(value: Any) -> Any:
    """Convert numpy containers into JSON-friendly values"""
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return {"real": value.real.tolist(), "imag": value.imag.tolist()}
        return value.tolist()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


class _Serializable:
    def to_dict(self) -> Dict[str, Any]:
        return _plain(asdict(self))


@dataclass(frozen=True)
class SpectralGrid(_Serializable):
    """Uniform grid in angular frequency"""
    center: AngularFrequency
    span: float
    n_points: int

    @property
    def step(self) -> float:
        return self.span / (self.n_points - 1)

    @property
    def first(self) -> float:
        return self.center - self.span / 2

    @property
    def last(self) -> float:
        return self.center + self.span / 2

    @property
    def points(self) -> np.ndarray:
        offsets = (np.arange(self.n_points) - (self.n_points - 1) / 2) * self.step
        return self.center + offsets

    def contains(self, omega: float) -> bool:
        return self.first <= omega <= self.last


@dataclass(frozen=True)
class LorentzianLine(_Serializable):
    """Single-pole resonance: center and full width at half maximum"""
    center: AngularFrequency
    fwhm: float


@dataclass(frozen=True)
class RingParams(_Serializable):
    """Cold add-drop racetrack geometry and resonances"""
    length_m: float = 66.8e-6
    group_index: float = 4.18
    pump_wavelength_m: Wavelength = 1547.6e-9
    signal_wavelength_m: Wavelength = 1530.4e-9
    idler_wavelength_m: Wavelength = 1564.9e-9
    q_pump: float = 22100.0
    q_signal: float = 21900.0
    q_idler: float = 14900.0
    through_extinction_db: float = 15.0
    drop_loss_db: float = 9.0
    energy_matched: bool = True

    def wavelength(self, which: str) -> Wavelength:
        return getattr(self, f"{which}_wavelength_m")

    def q(self, which: str) -> float:
        return getattr(self, f"q_{which}")


@dataclass(frozen=True)
class ThermalNonlinearParams(_Serializable):
    """Thermo-optic shift and TPA broadening coefficients"""
    shift_coefficient_m_per_w: float = 4.8e-8
    tpa_power_w: float = 5e-3
    tpa_loss_fraction: float = 0.005


@dataclass(frozen=True)
class HotRingState(_Serializable):
    """Power-dependent resonances of the ring"""
    power_in_w: float
    pump_center: AngularFrequency
    signal_center: AngularFrequency
    idler_center: AngularFrequency
    pump_fwhm: float
    signal_fwhm: float
    idler_fwhm: float
    drop_peak_factor: float = 1.0

    def line(self, which: str) -> LorentzianLine:
        return LorentzianLine(center=getattr(self, f"{which}_center"),
                              fwhm=getattr(self, f"{which}_fwhm"))


@dataclass(frozen=True)
class LoopParams(_Serializable):
    """Fiber-loop laser: losses, gain calibration, mode structure"""
    round_trip_transmission: float = 0.0895
    saturation_power_w: float = 31.62e-3
    threshold_current_ma: float = 70.4
    slope_efficiency_w_per_ma: float = 100.1e-9
    gain_law: str = "linear"
    ring_input_factor: float = 0.14
    monitor_factor: float = 565.0
    mode_spacing_m: float = 0.05e-12
    weight_exponent: float = 0.5
    damping: float = 0.5
    tolerance: float = 1e-6
    max_iterations: int = 10000


@dataclass(frozen=True)
class LasingState(_Serializable):
    """Converged steady state of the loop at one supply current"""
    current_ma: float
    power_in_w: float
    lasing_center: AngularFrequency
    hot: HotRingState
    above_threshold: bool
    net_gain: float = 1.0
    iterations: int = 0


@dataclass(frozen=True, eq=False)
class PumpSpectrum(_Serializable):
    """Multimode comb: complex spectral amplitude per loop mode

    ``sum(|amplitudes|**2) * grid.step == total_power_w``.
    """
    grid: SpectralGrid
    amplitudes: np.ndarray
    total_power_w: float

    @property
    def mode_powers(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2 * self.grid.step

    @property
    def n_active(self) -> int:
        return int(np.count_nonzero(self.amplitudes))


@dataclass(frozen=True, eq=False)
class JointSpectralAmplitude(_Serializable):
    """phi(omega_s, omega_i) on a rectangular grid, rows are signal points"""
    signal_grid: SpectralGrid
    idler_grid: SpectralGrid
    amplitudes: np.ndarray
    normalized: bool = False

    @property
    def cell_area(self) -> float:
        return self.signal_grid.step * self.idler_grid.step


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum(_Serializable):
    """Schmidt coefficients sorted descending, summing to one"""
    coefficients: np.ndarray


@dataclass(frozen=True)
class DetectionChain(_Serializable):
    """Per-arm transmissions, detector timing and noise"""
    signal_transmission_db: float = -13.1
    idler_transmission_db: float = -14.2
    jitter_sigma_s: float = 25e-12
    bin_width_s: float = 35e-12
    noise_linear_signal: float = 1e6
    noise_linear_idler: float = 1e6
    noise_quadratic_signal: float = 3.9e11
    noise_quadratic_idler: float = 3.0e11
    dark_count_rate: float = 100.0

    @property
    def signal_transmission(self) -> float:
        return 10 ** (self.signal_transmission_db / 10)

    @property
    def idler_transmission(self) -> float:
        return 10 ** (self.idler_transmission_db / 10)


@dataclass(frozen=True)
class CoincidenceRates(_Serializable):
    """Detected rates for one operating point, counts/s"""
    singles_signal: float
    singles_idler: float
    true_coincidences: float
    pair_singles_signal: float
    pair_singles_idler: float


@dataclass(frozen=True, eq=False)
class CoincidenceHistogram(_Serializable):
    """Binned signal-minus-idler delays"""
    bin_edges: np.ndarray
    counts: np.ndarray
    acquisition_time_s: float

    @property
    def bin_width(self) -> float:
        return float(self.bin_edges[1] - self.bin_edges[0])

    @property
    def delays(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


@dataclass(frozen=True)
class BiphotonParams(_Serializable):
    """JSA grids, theory pump powers and the absolute rate constant"""
    signal_points: int = 401
    signal_step_m: float = 1e-12
    idler_points: int = 201
    idler_step_m: float = 2e-12
    pump_modes: int = 4001
    theory_powers_w: List[float] = field(
        default_factory=lambda: [0.65e-3, 0.90e-3, 1.15e-3, 1.43e-3])
    theory_phase_model: str = "coherent"
    rate_constant: float = 1e12


@dataclass(frozen=True)
class AnalysisParams(_Serializable):
    """Sweep ranges and Monte-Carlo settings for the figure pipelines"""
    current_start_ma: float = 0.0
    current_stop_ma: float = 120.0
    current_step_ma: float = 1.0
    fit_window_ma: List[float] = field(default_factory=lambda: [72.0, 95.0])
    spectra_powers_w: List[float] = field(
        default_factory=lambda: [0.1e-3, 0.5e-3, 1.0e-3, 1.5e-3, 2.19e-3])
    coincidence_powers_w: List[float] = field(
        default_factory=lambda: [0.3e-3, 0.5e-3, 0.75e-3, 1.0e-3, 1.25e-3,
                                 1.5e-3, 1.75e-3, 2.0e-3, 2.19e-3])
    histogram_power_w: float = 2.157e-3
    histogram_duration_s: float = 2.0
    histogram_half_range_bins: int = 500
    chunk_events: float = 5e6
    schmidt_truncation: float = 1e-12
    reference_schmidt_numbers: List[float] = field(default_factory=lambda: [4.07, 2.75])


@dataclass(frozen=True)
class Scenario(_Serializable):
    """Complete scenario: every parameter block plus seed and output location"""
    name: str
    ring: RingParams
    thermal: ThermalNonlinearParams
    loop: LoopParams
    detection: DetectionChain
    biphoton: BiphotonParams
    analysis: AnalysisParams
    seed: Optional[int] = None
    output_dir: Optional[str] = None
