#!/usr/bin/env python3
"""
Tests for the experiment system (command handlers and trial chunking)
"""

import math

import pytest

from src.concentration_lab import lemma1_n_value
from src.experiment_system import ExperimentSystem, run_experiment, tail_sweep_values, trial_chunks
from src.linalg_core import RandomStream
from src.quantum_states import random_state, save_state
from src.results_manager import write_report
from src.sdc_classes import ExperimentConfig
from src.sdc_errors import ArgumentError, InputError


def _config(command: str, **kwargs) -> ExperimentConfig:
    return ExperimentConfig(command=command, **kwargs)


def test_trial_chunks():
    assert trial_chunks(10, 3) == [range(0, 4), range(4, 7), range(7, 10)]
    assert trial_chunks(2, 5) == [range(0, 1), range(1, 2)]
    assert trial_chunks(5, 1) == [range(0, 5)]


def test_tail_sweep_values():
    assert tail_sweep_values(16, 2) == [2, 4, 8, 16]
    assert tail_sweep_values(5, 2) == [2, 4, 5]
    assert tail_sweep_values(3, 3) == [3]
    with pytest.raises(ArgumentError):
        tail_sweep_values(1, 2)


def test_config_validation_names_the_flag():
    with pytest.raises(ArgumentError, match="--trials"):
        _config("tail", trials=50).validate()
    with pytest.raises(ArgumentError, match="--d-a"):
        _config("exact", d_a=0).validate()
    with pytest.raises(ArgumentError):
        _config("exact", state_spec="ghz").validate()
    with pytest.raises(ArgumentError):
        _config("teleport").validate()
    with pytest.raises(ArgumentError, match="--seed"):
        _config("resources", seed=2 ** 64 + 1).validate()
    # closed-form commands accept large d
    _config("bounds", d=1024).validate()


def test_exact_product_state():
    report = run_experiment(_config("exact", d=2, state_spec="product", trials=10_000, seed=7))
    results = report.results
    sigma = math.sqrt(0.25 / 10_000)
    assert results["predicted_success"] == pytest.approx(0.5)
    assert abs(results["empirical_success"] - 0.5) <= 3 * sigma
    assert results["min_fidelity"] >= 1 - 1e-9
    assert results["flatness_epsilon"] == pytest.approx(1.0)
    assert report.seed == 7
    assert report.rows[0]["command"] == "exact"


def test_exact_max_entangled_always_succeeds():
    report = run_experiment(_config("exact", d=4, state_spec="mes", trials=500))
    assert report.results["successes"] == 500


@pytest.mark.parametrize("command, extra", [
    ("randomized", {"d_a": 8, "ensemble_size": 16}),
    ("share", {"d_a": 4, "ensemble_size": 8, "state_spec": "haar"}),
    ("tail", {"d_a": 8}),
])
def test_output_independent_of_workers(command, extra):
    base = dict(d=2, trials=300, seed=11, output="json", **extra)
    serial = write_report(run_experiment(_config(command, workers=1, **base)), "json")
    parallel = write_report(run_experiment(_config(command, workers=4, **base)), "json")
    assert serial == parallel


def test_randomized_report():
    report = run_experiment(_config("randomized", d=2, d_a=16, ensemble_size=64, trials=2000, seed=5))
    results = report.results
    assert results["unrandomized_success"] == pytest.approx(0.5)
    assert results["predicted_success"] > 0.5
    assert results["resources"]["shared_random_bits"] == pytest.approx(6.0)
    assert results["min_fidelity"] >= 1 - 1e-9


def test_randomized_infeasible_dims():
    with pytest.raises(ArgumentError):
        run_experiment(_config("randomized", d=4, d_a=2, trials=10))


def test_share_report_is_exact():
    report = run_experiment(_config("share", d=2, d_a1=2, d_a=4, ensemble_size=16,
                                    state_spec="haar", trials=500, seed=3))
    assert report.results["min_fidelity"] >= 1 - 1e-9
    assert report.results["max_marginal_deviation"] <= 1e-9


def test_share_mes_target():
    report = run_experiment(_config("share", d=2, d_a1=4, d_a=4, ensemble_size=4,
                                    state_spec="mes", trials=200))
    assert report.results["successes"] > 0


def test_tail_report_rows():
    report = run_experiment(_config("tail", d=2, d_a=8, epsilon=0.8, trials=400, seed=2))
    assert [row["d_a"] for row in report.rows] == [2, 4, 8]
    assert report.columns[0] == "d_a"
    assert report.results["non_increasing"]


def test_flat_fraction_report():
    report = run_experiment(_config("flat-fraction", d=2, d_a=16, ensemble_size=200,
                                    epsilon=0.8, seed=2024))
    assert len(report.rows) == 200
    assert report.results["flat_fraction"] >= 0.5
    assert 0.0 <= report.results["proof_flat_fraction"] <= report.results["flat_fraction"]


def test_bounds_report():
    report = run_experiment(_config("bounds", d=1024, epsilon=0.5))
    assert report.results["lemma1_n"] == pytest.approx(lemma1_n_value(1024, 0.5))
    assert report.results["simplified_covers_threshold"]
    assert [row["quantity"] for row in report.rows][:3] == ["lemma1_d_a", "lemma1_n", "npure_threshold"]


def test_bounds_hypothesis_violation():
    with pytest.raises(ArgumentError):
        run_experiment(_config("bounds", d=2, epsilon=0.5))


def test_resources_report():
    report = run_experiment(_config("resources", l=10, epsilon=1.0))
    assert report.results["pure"]["qubits"] == pytest.approx(20.32, abs=0.01)
    assert report.results["sharing"]["qubits"] == report.results["pure"]["qubits"]
    assert [row["l"] for row in report.rows] == [10, 100, 1000, 10000]


def test_file_state(tmp_path):
    path = tmp_path / "target.json"
    save_state(random_state((3, 2), RandomStream(1)), str(path))
    report = run_experiment(_config("exact", state_spec=f"file:{path}", trials=200))
    assert report.results["min_fidelity"] >= 1 - 1e-9
    with pytest.raises(ArgumentError):
        ExperimentSystem(_config("share", state_spec=f"file:{path}")).sharing_target()
    with pytest.raises(InputError):
        run_experiment(_config("exact", state_spec=f"file:{tmp_path / 'missing.json'}", trials=10))


def test_haar_target_depends_only_on_seed():
    a = ExperimentSystem(_config("exact", state_spec="haar", seed=9)).bipartite_target()
    b = ExperimentSystem(_config("exact", state_spec="haar", seed=9, trials=5)).bipartite_target()
    assert (a.amplitudes == b.amplitudes).all()
