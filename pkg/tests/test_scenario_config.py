import json

import pytest

from src.config.scenario_config import load_scenario, parse_scenario
from src.schema.data_models import LoopParams, RingParams, ThermalNonlinearParams
from src.utils.errors import ConfigError


def _write(tmp_path, data, name="scenario.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data, indent=2))
    return str(path)


def test_default_scenario_is_complete_and_valid(default_config_path):
    scenario, report = load_scenario(default_config_path)
    assert report.valid
    assert report.defaulted == []
    assert scenario.name == "default"
    assert scenario.seed == 20240611


def test_decimal_strings_match_literals_exactly(scenario):
    assert scenario.ring.length_m == RingParams().length_m == 66.8e-6
    assert scenario.ring.pump_wavelength_m == 1547.6e-9
    assert scenario.thermal.shift_coefficient_m_per_w == ThermalNonlinearParams().shift_coefficient_m_per_w
    assert scenario.loop.slope_efficiency_w_per_ma == LoopParams().slope_efficiency_w_per_ma


def test_empty_scenario_takes_every_default():
    scenario, report = parse_scenario("{}", default_name="bare")
    assert report.valid
    assert scenario.name == "bare"
    assert scenario.ring == RingParams()
    assert ("ring.q_pump", 22100.0) in report.defaulted
    assert ("name", "bare") in report.defaulted


def test_non_positive_quality_factor_names_the_field():
    text = json.dumps({"ring": {"q_idler": 0}}, indent=2)
    _, report = parse_scenario(text)
    assert not report.valid
    paths = [path for path, _ in report.issues]
    assert paths == ["ring.q_idler"]
    assert "(line 3)" in report.issues[0][1]


def test_invalid_json_reports_position(tmp_path):
    path = _write(tmp_path, '{\n  "ring": {\n    "q_pump": 22100,\n  }\n}')
    with pytest.raises(ConfigError) as info:
        load_scenario(path)
    assert info.value.line == 4
    assert info.value.column is not None
    assert info.value.exit_code == 2


def test_unknown_fields_and_blocks_are_reported():
    _, report = parse_scenario(json.dumps({"ring": {"radius_m": 1e-5}, "laser": {}}))
    paths = {path for path, _ in report.issues}
    assert paths == {"ring.radius_m", "laser"}


def test_type_errors_are_reported():
    _, report = parse_scenario(json.dumps({"ring": {"energy_matched": "yes"},
                                           "loop": {"max_iterations": 2.5}}))
    paths = {path for path, _ in report.issues}
    assert paths == {"ring.energy_matched", "loop.max_iterations"}


def test_cross_field_rules():
    _, report = parse_scenario(json.dumps({
        "analysis": {"current_start_ma": 50, "current_stop_ma": 40, "fit_window_ma": [95, 72]},
        "biphoton": {"pump_modes": 4000},
    }))
    paths = {path for path, _ in report.issues}
    assert {"analysis.current_stop_ma", "analysis.fit_window_ma", "biphoton.pump_modes"} <= paths


def test_stochastic_command_requires_seed(tmp_path):
    path = _write(tmp_path, {"name": "unseeded"})
    scenario, _ = load_scenario(path)
    assert scenario.seed is None
    with pytest.raises(ConfigError) as info:
        load_scenario(path, stochastic=True)
    assert any(field == "seed" for field, _ in info.value.issues)


def test_seed_override(tmp_path, default_config_path):
    scenario, _ = load_scenario(default_config_path, stochastic=True, seed=7)
    assert scenario.seed == 7
    unseeded = _write(tmp_path, {"name": "unseeded"})
    assert load_scenario(unseeded, stochastic=True, seed=11)[0].seed == 11


def test_seed_must_fit_in_64_bits(default_config_path):
    with pytest.raises(ConfigError):
        load_scenario(default_config_path, seed=2 ** 64)


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(str(tmp_path / "absent.json"))


def test_file_name_becomes_default_name(tmp_path):
    scenario, _ = load_scenario(_write(tmp_path, {}, name="bench.json"))
    assert scenario.name == "bench"


def test_swapped_signal_and_idler_are_rejected():
    _, report = parse_scenario(json.dumps({"ring": {"signal_wavelength_m": 1600e-9,
                                                    "idler_wavelength_m": 1500e-9}}))
    assert not report.valid
    paths = {path for path, _ in report.issues}
    assert paths == {"ring.signal_wavelength_m", "ring.idler_wavelength_m"}


def test_resonances_must_sit_two_fsr_from_the_pump():
    _, report = parse_scenario(json.dumps({"ring": {"idler_wavelength_m": 1556.2e-9}}))
    assert [path for path, _ in report.issues] == ["ring.idler_wavelength_m"]
    assert "2 FSR" in report.issues[0][1]

    _, shifted = parse_scenario(json.dumps({"ring": {"signal_wavelength_m": 1530.0e-9}}))
    assert shifted.valid
