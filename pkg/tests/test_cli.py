import json
import os

import numpy as np
import pandas as pd
import pytest

from app import main
from src.tools.matrix_parser import MatrixParser

SMALL_SCENARIO = {
    "name": "small",
    "seed": 11,
    "biphoton": {"signal_points": 41, "signal_step_m": 2e-12, "idler_points": 41,
                 "idler_step_m": 2e-12, "pump_modes": 1001, "theory_powers_w": [1e-3]},
    "analysis": {"current_start_ma": 60, "current_stop_ma": 100, "current_step_ma": 2,
                 "spectra_powers_w": [1e-3], "coincidence_powers_w": [1e-3, 2e-3],
                 "histogram_duration_s": 0.2, "histogram_half_range_bins": 100},
}


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL_SCENARIO, indent=2))
    return str(path)


def _run(*argv):
    return main([str(arg) for arg in argv])


def test_validate_default_scenario(default_config_path, capsys):
    assert _run("validate", "--config", default_config_path) == 0
    assert "valid" in capsys.readouterr().out


def test_validate_reports_bad_field(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"ring": {"q_pump": -1}}, indent=2))
    assert _run("validate", "--config", path) == 2
    out = capsys.readouterr().out
    assert "ring.q_pump" in out
    assert "Defaulted fields:" in out


def test_validate_rejects_misordered_resonances(tmp_path, capsys):
    path = tmp_path / "swapped.json"
    path.write_text(json.dumps({"ring": {"signal_wavelength_m": 1600e-9,
                                         "idler_wavelength_m": 1500e-9}}, indent=2))
    assert _run("validate", "--config", path) == 2
    out = capsys.readouterr().out
    assert "ring.signal_wavelength_m" in out and "ring.idler_wavelength_m" in out


def test_malformed_config_exits_with_config_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"ring": ')
    assert _run("lasing-curve", "--config", path, "--out", tmp_path / "out") == 2
    assert "configuration error" in capsys.readouterr().err


def test_lasing_curve_command_writes_outputs(small_config, tmp_path):
    out = tmp_path / "out"
    assert _run("lasing-curve", "--config", small_config, "--out", out) == 0
    assert {"lasing_curve.csv", "summary.txt", "run_manifest.json"} <= set(os.listdir(out))

    curve = pd.read_csv(out / "lasing_curve.csv", comment="#")
    assert curve["current_mA"].tolist() == list(np.arange(60.0, 101.0, 2.0))
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["stages"][0]["success"]
    assert manifest["provenance"]["seed"] == 11
    assert "LASING CURVE" in (out / "summary.txt").read_text().upper()


def test_reruns_are_byte_identical(small_config, tmp_path):
    for name in ("a", "b"):
        assert _run("pump-spectra", "--config", small_config, "--out", tmp_path / name,
                    "--no-timestamp") == 0
    first, second = tmp_path / "a", tmp_path / "b"
    assert sorted(os.listdir(first)) == sorted(os.listdir(second))
    for filename in os.listdir(first):
        assert (first / filename).read_bytes() == (second / filename).read_bytes(), filename


def test_seed_override_changes_provenance(small_config, tmp_path):
    assert _run("pump-spectra", "--config", small_config, "--out", tmp_path,
                "--seed", 99, "--no-timestamp") == 0
    header = (tmp_path / "pump_spectrum_1mW.csv").read_text().splitlines()[:3]
    assert header[2] == "# seed=99"


def test_zero_power_jsd_is_anti_diagonal(small_config, tmp_path):
    assert _run("jsd", "--config", small_config, "--out", tmp_path, "--power", 0) == 0
    jsa, has_phase = MatrixParser().read(str(tmp_path / "jsd_single_mode.csv"))
    assert not has_phase
    density = np.abs(jsa.amplitudes) ** 2
    filled = [row for row in range(density.shape[0]) if density[row].any()]
    assert len(filled) > 30
    assert max(np.count_nonzero(density[row]) for row in filled) <= 3
    columns = [int(np.argmax(density[row])) for row in filled]
    assert np.all(np.diff(columns) <= 0)


def test_schmidt_from_matrix_file(small_config, tmp_path):
    assert _run("jsd", "--config", small_config, "--out", tmp_path, "--power", 1) == 0
    assert _run("schmidt", "--config", small_config, "--out", tmp_path,
                "--input", tmp_path / "jsa_1mW.csv") == 0
    frame = pd.read_csv(tmp_path / "schmidt.csv", comment="#", skipfooter=2, engine="python")
    assert list(frame.columns) == ["n", "lambda_n"]
    assert frame["lambda_n"].sum() == pytest.approx(1.0, rel=1e-9)

    footer = (tmp_path / "schmidt.csv").read_text().splitlines()[-2:]
    assert footer[0] == "K,S_bits"
    k, s_bits = (float(value) for value in footer[1].split(","))
    lambdas = frame["lambda_n"].to_numpy()
    assert k == pytest.approx(1.0 / np.sum(lambdas ** 2), rel=1e-6)
    assert s_bits >= 0.0


def test_coincidences_require_a_seed(tmp_path, capsys):
    unseeded = dict(SMALL_SCENARIO, seed=None)
    path = tmp_path / "unseeded.json"
    path.write_text(json.dumps(unseeded))
    assert _run("coincidences", "--config", path, "--out", tmp_path / "out") == 2
    assert "seed" in capsys.readouterr().err


def test_coincidences_command(small_config, tmp_path):
    assert _run("coincidences", "--config", small_config, "--out", tmp_path) == 0
    rows = pd.read_csv(tmp_path / "coincidences.csv", comment="#")
    assert len(rows) == 2
    histogram = pd.read_csv(tmp_path / "coincidence_histogram.csv", comment="#")
    assert list(histogram.columns) == ["delay_ps", "counts"]
    assert len(histogram) == 201


def _random_phase_config(tmp_path, seed):
    scenario = dict(SMALL_SCENARIO, seed=seed,
                    biphoton=dict(SMALL_SCENARIO["biphoton"], theory_phase_model="random"))
    path = tmp_path / f"random_{seed}.json"
    path.write_text(json.dumps(scenario))
    return path


def test_random_phase_jsd_requires_a_seed(tmp_path, capsys):
    path = _random_phase_config(tmp_path, None)
    for command in ("jsd", "schmidt"):
        assert _run(command, "--config", path, "--out", tmp_path / "out", "--power", 1.43) == 2
        assert "seed" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_random_phase_jsd_is_reproducible_with_a_seed(tmp_path):
    path = _random_phase_config(tmp_path, 5)
    for name in ("a", "b"):
        assert _run("jsd", "--config", path, "--out", tmp_path / name, "--power", 1.43,
                    "--no-timestamp") == 0
    first = (tmp_path / "a" / "jsa_1.43mW.csv").read_bytes()
    assert first == (tmp_path / "b" / "jsa_1.43mW.csv").read_bytes()


def test_matrix_file_schmidt_needs_no_seed(small_config, tmp_path):
    assert _run("jsd", "--config", small_config, "--out", tmp_path, "--power", 1) == 0
    path = _random_phase_config(tmp_path, None)
    assert _run("schmidt", "--config", path, "--out", tmp_path,
                "--input", tmp_path / "jsa_1mW.csv") == 0
