#!/usr/bin/env python3
"""
CLI tests: exit codes, output formats, seed resolution
"""

import io
import json

import pytest

from src.concentration_lab import TAIL_CSV_COLUMNS
from src.sdc_cli import EXIT_DOMAIN, EXIT_INPUT, EXIT_IO, EXIT_OK, EXIT_USAGE, main


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def test_exact_json():
    code, text = run_cli("exact", "--d", "2", "--trials", "500", "--seed", "1", "--output", "json")
    assert code == EXIT_OK
    data = json.loads(text)
    assert data["command"] == "exact"
    assert data["config"]["seed"] == 1
    assert data["config"]["seed_source"] == "flag"
    assert 0.0 <= data["results"]["empirical_success"] <= 1.0


def test_repeat_runs_are_byte_identical():
    argv = ("randomized", "--d", "2", "--d-a", "8", "--ensemble-size", "16",
            "--trials", "300", "--seed", "0x2a", "--output", "json")
    assert run_cli(*argv) == run_cli(*argv)


def test_bounds_and_resources():
    code, text = run_cli("bounds", "--d", "1024", "--epsilon", "0.5", "--output", "json")
    assert code == EXIT_OK
    assert json.loads(text)["results"]["threshold_feasible"] in (True, False)

    code, text = run_cli("resources", "--l", "10", "--epsilon", "1.0", "--output", "json")
    assert code == EXIT_OK
    assert json.loads(text)["results"]["pure"]["qubits"] == pytest.approx(20.32, abs=0.01)


def test_tail_csv_header():
    code, text = run_cli("tail", "--d", "2", "--d-a", "4", "--trials", "200", "--output", "csv")
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == ",".join(TAIL_CSV_COLUMNS)
    assert len(lines) == 3


def test_pretty_output_has_seed_line():
    code, text = run_cli("resources", "--seed", "0")
    assert code == EXIT_OK
    assert "seed: 0" in text.splitlines()


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("SDC_SEED", "99")
    _, text = run_cli("resources", "--output", "json")
    config = json.loads(text)["config"]
    assert (config["seed"], config["seed_source"]) == (99, "env")

    _, text = run_cli("resources", "--seed", "5", "--output", "json")
    config = json.loads(text)["config"]
    assert (config["seed"], config["seed_source"]) == (5, "flag")


def test_bad_seed_environment(monkeypatch):
    monkeypatch.setenv("SDC_SEED", "abc")
    code, _ = run_cli("resources")
    assert code == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ("exact", "--d", "two"),
    ("teleport",),
    ("exact", "--trials", "0"),
    ("tail", "--trials", "50"),
    ("exact", "--epsilon", "1.5"),
    ("exact", "--output", "xml"),
])
def test_usage_errors(argv, capsys):
    code, text = run_cli(*argv)
    assert code == EXIT_USAGE
    assert text == ""


def test_validation_message_names_flag(capsys):
    run_cli("exact", "--trials", "0")
    assert "--trials" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ("bounds", "--d", "2", "--epsilon", "0.5"),
    ("randomized", "--d", "4", "--d-a", "2", "--trials", "10"),
    ("resources", "--l", "2", "--epsilon", "1.0"),
])
def test_domain_errors(argv):
    code, text = run_cli(*argv)
    assert code == EXIT_DOMAIN
    assert text == ""


def test_missing_state_file():
    code, _ = run_cli("exact", "--state", "file:/nonexistent/state.json", "--trials", "10")
    assert code == EXIT_INPUT


def test_save_writes_report(tmp_path):
    results_dir = tmp_path / "results"
    code, text = run_cli("resources", "--seed", "3", "--output", "json", "--save",
                         "--results-dir", str(results_dir))
    assert code == EXIT_OK
    saved = results_dir / "resources_seed3.json"
    assert saved.read_text(encoding="utf-8") == text


def test_save_to_unwritable_dir(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    code, _ = run_cli("resources", "--save", "--results-dir", str(blocker))
    assert code == EXIT_IO


def test_alternate_config_file(tmp_path):
    config_file = tmp_path / "defaults.json"
    config_file.write_text(json.dumps({"defaults": {"trials": 150, "d": 3, "bogus": 1}}), encoding="utf-8")
    code, text = run_cli("exact", "--config", str(config_file), "--output", "json")
    assert code == EXIT_OK
    config = json.loads(text)["config"]
    assert (config["trials"], config["d"]) == (150, 3)


def test_malformed_config_falls_back(tmp_path):
    config_file = tmp_path / "broken.json"
    config_file.write_text("{not json", encoding="utf-8")
    code, text = run_cli("resources", "--config", str(config_file), "--output", "json")
    assert code == EXIT_OK
    assert json.loads(text)["config"]["l"] == 10


def test_undecodable_state_file(tmp_path):
    garbled = tmp_path / "garbled.json"
    garbled.write_bytes(b'{"partition": [1], "amplitudes": "\xff\xfe"}')
    code, text = run_cli("exact", "--state", f"file:{garbled}", "--trials", "10")
    assert code == EXIT_INPUT
    assert text == ""


def test_state_path_is_a_directory(tmp_path, capsys):
    code, _ = run_cli("exact", "--state", f"file:{tmp_path}", "--trials", "10")
    assert code == EXIT_INPUT
    assert "入力エラー" in capsys.readouterr().err


@pytest.mark.parametrize("value", ["two", None, [2], True])
def test_config_value_of_wrong_type(tmp_path, value, capsys):
    config_file = tmp_path / "defaults.json"
    config_file.write_text(json.dumps({"defaults": {"d": value}}), encoding="utf-8")
    code, text = run_cli("exact", "--config", str(config_file))
    assert code == EXIT_USAGE
    assert text == ""
    assert "d=" in capsys.readouterr().err


def test_config_flag_overrides_bad_file_value(tmp_path):
    config_file = tmp_path / "defaults.json"
    config_file.write_text(json.dumps({"defaults": {"d": "two"}}), encoding="utf-8")
    code, _ = run_cli("resources", "--config", str(config_file), "--d", "2")
    assert code == EXIT_OK


def test_config_directory_falls_back(tmp_path):
    code, text = run_cli("resources", "--config", str(tmp_path), "--output", "json")
    assert code == EXIT_OK
    assert json.loads(text)["config"]["l"] == 10


def test_undecodable_config_falls_back(tmp_path):
    config_file = tmp_path / "defaults.json"
    config_file.write_bytes(b'{"defaults": {"l": "\xff"}}')
    code, text = run_cli("resources", "--config", str(config_file), "--output", "json")
    assert code == EXIT_OK
    assert json.loads(text)["config"]["l"] == 10


@pytest.mark.parametrize("seed", ["18446744073709551617", "-1"])
def test_seed_outside_64_bits(seed, capsys):
    code, _ = run_cli("resources", "--seed", seed)
    assert code == EXIT_USAGE
    assert "--seed" in capsys.readouterr().err


def test_largest_seed_runs():
    code, text = run_cli("resources", "--seed", "0xffffffffffffffff", "--output", "json")
    assert code == EXIT_OK
    assert json.loads(text)["config"]["seed"] == 2 ** 64 - 1
