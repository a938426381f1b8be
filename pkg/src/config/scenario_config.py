"""
Scenario configuration: JSON loading, defaults and validation
"""

import json
import logging
import math
import re
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Optional, Tuple, get_origin

from src.models.ring import fsr
from src.schema.data_models import (
    RESONANCES,
    AnalysisParams,
    BiphotonParams,
    DetectionChain,
    LoopParams,
    RingParams,
    Scenario,
    ThermalNonlinearParams,
)
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

BLOCKS = {
    "ring": RingParams,
    "thermal": ThermalNonlinearParams,
    "loop": LoopParams,
    "detection": DetectionChain,
    "biphoton": BiphotonParams,
    "analysis": AnalysisParams,
}
TOP_LEVEL = ("name", "seed", "output_dir")
SEED_LIMIT = 2 ** 64


@dataclass
class ValidationReport:
    """Outcome of loading a scenario"""
    issues: List[Tuple[str, str]] = field(default_factory=list)
    defaulted: List[Tuple[str, Any]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.issues


def _locate(text: str, key: str) -> Optional[int]:
    """Line of the first occurrence of ``"key"`` in the source text"""
    match = re.search(rf'"{re.escape(key)}"\s*:', text)
    if not match:
        return None
    return text.count("\n", 0, match.start()) + 1


def _coerce(value: Any, expected: Any, path: str) -> Any:
    """Convert a JSON value to the dataclass field type; strings may carry decimals"""
    origin = get_origin(expected)
    if origin in (list, List):
        if not isinstance(value, list):
            raise ValueError("expected a list of numbers")
        return [_coerce(item, float, f"{path}[]") for item in value]
    if expected is bool:
        if not isinstance(value, bool):
            raise ValueError("expected true or false")
        return value
    if expected is str:
        if not isinstance(value, str):
            raise ValueError("expected a string")
        return value
    if isinstance(value, bool):
        raise ValueError("expected a number, got a boolean")
    if expected is int:
        number = int(value) if isinstance(value, str) else value
        if not isinstance(number, int) and not (isinstance(number, float) and number.is_integer()):
            raise ValueError("expected an integer")
        return int(number)
    if isinstance(value, str):
        return float(value)
    if not isinstance(value, (int, float)):
        raise ValueError("expected a number")
    return float(value)


def _build_block(name: str, cls: type, raw: Any,
                 report: ValidationReport) -> Any:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        report.issues.append((name, "expected an object"))
        return cls()

    known = {f.name: f for f in fields(cls)}
    for key in raw:
        if key not in known:
            report.issues.append((f"{name}.{key}", "unknown field"))

    values = {}
    for key, declared in known.items():
        path = f"{name}.{key}"
        if key not in raw:
            report.defaulted.append((path, getattr(cls(), key)))
            continue
        try:
            values[key] = _coerce(raw[key], declared.type, path)
        except (TypeError, ValueError) as e:
            report.issues.append((path, str(e)))
    return cls(**values)


def _check(report: ValidationReport, condition: bool, path: str, message: str) -> None:
    if not condition:
        report.issues.append((path, message))


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


def validate_scenario(scenario: Scenario, report: ValidationReport) -> None:
    """Check every parameter invariant; issues are appended to ``report``"""
    ring = scenario.ring
    for which in ("pump", "signal", "idler"):
        _check(report, ring.wavelength(which) > 0 and _finite(ring.wavelength(which)),
               f"ring.{which}_wavelength_m", "must be positive")
        _check(report, ring.q(which) > 0, f"ring.q_{which}", "quality factor must be positive")
    _check(report, ring.length_m > 0, "ring.length_m", "must be positive")
    _check(report, ring.group_index > 0, "ring.group_index", "must be positive")
    _check(report, ring.through_extinction_db >= 0, "ring.through_extinction_db", "must be >= 0 dB")
    _check(report, ring.drop_loss_db >= 0, "ring.drop_loss_db", "must be >= 0 dB")
    if all(ring.wavelength(w) > 0 and _finite(ring.wavelength(w)) for w in RESONANCES):
        pump = ring.pump_wavelength_m
        _check(report, ring.signal_wavelength_m < pump, "ring.signal_wavelength_m",
               "must lie below the pump resonance")
        _check(report, ring.idler_wavelength_m > pump, "ring.idler_wavelength_m",
               "must lie above the pump resonance")
        if ring.length_m > 0 and ring.group_index > 0:
            two_fsr = 2 * fsr(pump, ring.group_index, ring.length_m)
            for which, spacing in (("signal", pump - ring.signal_wavelength_m),
                                   ("idler", ring.idler_wavelength_m - pump)):
                _check(report, abs(spacing - two_fsr) <= 0.05 * two_fsr,
                       f"ring.{which}_wavelength_m",
                       f"must sit 2 FSR ({two_fsr * 1e9:.2f} nm) from the pump within 5%")

    thermal = scenario.thermal
    _check(report, thermal.shift_coefficient_m_per_w >= 0,
           "thermal.shift_coefficient_m_per_w", "must be >= 0")
    _check(report, thermal.tpa_power_w > 0, "thermal.tpa_power_w", "must be positive")
    _check(report, 0 <= thermal.tpa_loss_fraction <= 1,
           "thermal.tpa_loss_fraction", "must lie in [0, 1]")

    loop = scenario.loop
    _check(report, 0 < loop.round_trip_transmission < 1,
           "loop.round_trip_transmission", "must lie in (0, 1)")
    _check(report, loop.saturation_power_w > 0, "loop.saturation_power_w", "must be positive")
    _check(report, loop.threshold_current_ma > 0, "loop.threshold_current_ma", "must be positive")
    _check(report, loop.slope_efficiency_w_per_ma > 0,
           "loop.slope_efficiency_w_per_ma", "must be positive")
    _check(report, loop.gain_law in ("linear", "db_linear"),
           "loop.gain_law", "must be 'linear' or 'db_linear'")
    _check(report, loop.ring_input_factor > 0, "loop.ring_input_factor", "must be positive")
    _check(report, loop.monitor_factor > 0, "loop.monitor_factor", "must be positive")
    _check(report, loop.mode_spacing_m > 0, "loop.mode_spacing_m", "must be positive")
    _check(report, loop.weight_exponent >= 0, "loop.weight_exponent", "must be >= 0")
    _check(report, 0 < loop.damping <= 1, "loop.damping", "must lie in (0, 1]")
    _check(report, loop.tolerance > 0, "loop.tolerance", "must be positive")
    _check(report, loop.max_iterations >= 1, "loop.max_iterations", "must be >= 1")

    chain = scenario.detection
    _check(report, chain.signal_transmission_db <= 0,
           "detection.signal_transmission_db", "transmission must be <= 0 dB")
    _check(report, chain.idler_transmission_db <= 0,
           "detection.idler_transmission_db", "transmission must be <= 0 dB")
    _check(report, chain.bin_width_s > 0, "detection.bin_width_s", "must be positive")
    _check(report, chain.jitter_sigma_s >= 0, "detection.jitter_sigma_s", "must be >= 0")
    for key in ("noise_linear_signal", "noise_linear_idler", "noise_quadratic_signal",
                "noise_quadratic_idler", "dark_count_rate"):
        _check(report, getattr(chain, key) >= 0, f"detection.{key}", "must be >= 0")

    biphoton = scenario.biphoton
    _check(report, biphoton.signal_points >= 2, "biphoton.signal_points", "must be >= 2")
    _check(report, biphoton.idler_points >= 2, "biphoton.idler_points", "must be >= 2")
    _check(report, biphoton.signal_step_m > 0, "biphoton.signal_step_m", "must be positive")
    _check(report, biphoton.idler_step_m > 0, "biphoton.idler_step_m", "must be positive")
    _check(report, biphoton.pump_modes >= 3 and biphoton.pump_modes % 2 == 1,
           "biphoton.pump_modes", "must be an odd integer >= 3")
    _check(report, bool(biphoton.theory_powers_w) and all(p > 0 for p in biphoton.theory_powers_w),
           "biphoton.theory_powers_w", "must be a non-empty list of positive powers")
    _check(report, biphoton.theory_phase_model in ("random", "coherent"),
           "biphoton.theory_phase_model", "must be 'random' or 'coherent'")
    _check(report, biphoton.rate_constant >= 0, "biphoton.rate_constant", "must be >= 0")

    analysis = scenario.analysis
    _check(report, analysis.current_start_ma >= 0, "analysis.current_start_ma", "must be >= 0")
    _check(report, analysis.current_stop_ma >= analysis.current_start_ma,
           "analysis.current_stop_ma", "must not be below current_start_ma")
    _check(report, analysis.current_step_ma > 0, "analysis.current_step_ma", "must be positive")
    _check(report, len(analysis.fit_window_ma) == 2
           and analysis.fit_window_ma[0] < analysis.fit_window_ma[-1],
           "analysis.fit_window_ma", "must be [low, high] with low < high")
    for key in ("spectra_powers_w", "coincidence_powers_w"):
        values = getattr(analysis, key)
        _check(report, bool(values) and all(p > 0 for p in values),
               f"analysis.{key}", "must be a non-empty list of positive powers")
    _check(report, analysis.histogram_power_w > 0, "analysis.histogram_power_w", "must be positive")
    _check(report, analysis.histogram_duration_s > 0,
           "analysis.histogram_duration_s", "must be positive")
    _check(report, analysis.histogram_half_range_bins >= 1,
           "analysis.histogram_half_range_bins", "must be >= 1")
    _check(report, analysis.chunk_events > 0, "analysis.chunk_events", "must be positive")
    _check(report, 0 <= analysis.schmidt_truncation < 1,
           "analysis.schmidt_truncation", "must lie in [0, 1)")

    if scenario.seed is not None:
        _check(report, 0 <= scenario.seed < SEED_LIMIT, "seed", "must be a 64-bit unsigned integer")


def parse_scenario(text: str, default_name: str = "scenario") -> Tuple[Scenario, ValidationReport]:
    """Build and validate a scenario from JSON text; never raises on field errors"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object", line=1, column=1)

    report = ValidationReport()
    for key in data:
        if key not in BLOCKS and key not in TOP_LEVEL:
            report.issues.append((key, "unknown block"))

    blocks = {name: _build_block(name, cls, data.get(name), report)
              for name, cls in BLOCKS.items()}

    seed = data.get("seed")
    if seed is not None:
        try:
            seed = _coerce(seed, int, "seed")
        except (TypeError, ValueError) as e:
            report.issues.append(("seed", str(e)))
            seed = None
    name = data.get("name", default_name)
    if "name" not in data:
        report.defaulted.append(("name", default_name))

    scenario = Scenario(name=str(name), seed=seed, output_dir=data.get("output_dir"), **blocks)
    validate_scenario(scenario, report)

    # attach source lines to the issues for readable diagnostics
    report.issues = [(path, _with_line(text, path, message)) for path, message in report.issues]
    return scenario, report


def _with_line(text: str, path: str, message: str) -> str:
    line = _locate(text, path.split(".")[-1].rstrip("[]"))
    return f"{message} (line {line})" if line else message


def load_scenario(path: str, stochastic: bool = False,
                  seed: Optional[int] = None) -> Tuple[Scenario, ValidationReport]:
    """Read, validate and return a scenario; raise ConfigError on any issue

    ``seed`` overrides the file value. ``stochastic`` requires a seed from
    either source.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read scenario {path}: {e}") from e

    default_name = re.sub(r"\.json$", "", path.replace("\\", "/").split("/")[-1])
    scenario, report = parse_scenario(text, default_name=default_name)
    if seed is not None:
        scenario = replace(scenario, seed=seed)
        _check(report, 0 <= seed < SEED_LIMIT, "seed", "must be a 64-bit unsigned integer")
    if stochastic and scenario.seed is None:
        report.issues.append(("seed", "a seed is required for stochastic commands"))
    if not report.valid:
        raise ConfigError(f"scenario {path} is invalid", issues=report.issues)
    logger.info(f"Loaded scenario '{scenario.name}' from {path} "
                f"({len(report.defaulted)} defaulted fields)")
    return scenario, report
