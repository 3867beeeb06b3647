#!/usr/bin/env python3
"""
Superdense Coding Experiment System

Runs one configured experiment and turns it into an ExperimentReport.
Monte Carlo trials are split into contiguous chunks that run concurrently
via asyncio; trial t always draws from the streams (seed, 0, t) and
(seed, 1, t), so the report does not depend on the number of workers.
"""

import asyncio
import logging
import math
import time
from typing import Any, Callable, Dict, List, Sequence

import numpy as np

from src.concentration_lab import (
    TAIL_CSV_COLUMNS,
    is_non_increasing,
    lemma1_dimensions,
    lemma1_n_threshold,
    lemma2_n_value,
    lemma2_sufficient_n,
    log_mu_bound,
    marginal_norm,
    mu_bound,
    proof_threshold,
    sample_marginal_norms,
    statement_threshold,
    summarize_tail,
)
from src.linalg_core import SHARED_STREAM, RandomStream
from src.quantum_states import (
    PureState,
    basis_state,
    flatness_epsilon,
    load_state,
    max_entangled,
    random_state,
)
from src.resource_accounting import (
    APPROXIMATION_NOTE,
    PROFILE_TABLE_COLUMNS,
    entangled_sharing_profile,
    holevo_optimality_check,
    holevo_window,
    profile_table,
    pure_preparation_profile,
)
from src.sdc_classes import BoundParams, ExperimentConfig, ExperimentReport
from src.sdc_errors import ArgumentError
from src.sdc_protocols import (
    EntangledSharing,
    ExactPreparation,
    RandomizedPreparation,
    TrialSummary,
    guaranteed_success_lower_bound,
    sample_ensemble,
    simulate_trials,
    success_probability,
    summarize_outcomes,
)

logger = logging.getLogger(__name__)

# Haar-random targets come from their own stream so they never overlap trial draws
TARGET_STREAM = 2

PROTOCOL_CSV_COLUMNS = ["command", "d", "d_a", "ensemble_size", "trials", "successes",
                        "empirical_success", "predicted_success", "half_width", "min_fidelity"]
FLAT_FRACTION_CSV_COLUMNS = ["k", "marginal_norm", "flat"]
BOUNDS_CSV_COLUMNS = ["quantity", "value", "log2"]


def trial_chunks(trials: int, workers: int) -> List[range]:
    """Split range(trials) into at most ``workers`` contiguous, nonempty ranges."""
    workers = max(1, min(workers, trials))
    size, extra = divmod(trials, workers)
    chunks, start = [], 0
    for i in range(workers):
        stop = start + size + (1 if i < extra else 0)
        chunks.append(range(start, stop))
        start = stop
    return chunks


def tail_sweep_values(d_a_max: int, d: int) -> List[int]:
    """d_A = d, 2d, 4d, ... up to and including d_a_max."""
    if d_a_max < d:
        raise ArgumentError(f"--d-a={d_a_max} must be at least d={d} to embed a d^2-dimensional input")
    values, v = [], d
    while v < d_a_max:
        values.append(v)
        v *= 2
    values.append(d_a_max)
    return values


class ExperimentSystem:
    def __init__(self, config: ExperimentConfig):
        self.config = config.validate()
        self.seed = config.seed

    # --- targets ------------------------------------------------------------

    def _file_state(self, arity: int) -> PureState:
        path = self.config.state_spec[len("file:"):]
        psi = load_state(path)
        if len(psi.partition) != arity:
            raise ArgumentError(f"{path}: expected a {arity}-partite state, got partition {psi.partition}")
        return psi

    def bipartite_target(self) -> PureState:
        """Target on C^d (x) C^d chosen by --state."""
        d, kind = self.config.d, self.config.state_spec
        if kind == "mes":
            return max_entangled(d)
        if kind == "product":
            return basis_state(0, (d, d))
        if kind == "haar":
            return random_state((d, d), RandomStream(self.seed, TARGET_STREAM))
        return self._file_state(2)

    def sharing_target(self) -> PureState:
        """Target on A1 A2 B with dims (d_A1, d, d)."""
        d_a1, d, kind = self.config.d_a1, self.config.d, self.config.state_spec
        partition = (d_a1, d, d)
        if kind == "mes":
            # A1 maximally entangled with as much of A2 B as it can reach
            m = min(d_a1, d * d)
            v = np.zeros(d_a1 * d * d, dtype=np.complex128)
            v[np.arange(m) * (d * d) + np.arange(m)] = 1.0 / math.sqrt(m)
            return PureState(v, partition)
        if kind == "product":
            return basis_state(0, partition)
        if kind == "haar":
            return random_state(partition, RandomStream(self.seed, TARGET_STREAM))
        return self._file_state(3)

    # --- concurrency ----------------------------------------------------------

    async def _run_chunks(self, work: Callable[[range], Any], trials: int) -> List[Any]:
        """Run ``work`` on each trial chunk in a worker thread; results in chunk order."""
        chunks = trial_chunks(trials, self.config.workers)
        started = time.perf_counter()
        results = await asyncio.gather(*[asyncio.to_thread(work, chunk) for chunk in chunks])
        logger.debug("%d trials in %d chunks took %.3fs", trials, len(chunks), time.perf_counter() - started)
        return list(results)

    async def _simulate(self, protocol) -> TrialSummary:
        # fills the per-k cache before the threads share the protocol
        predicted = protocol.predicted_success
        batches = await self._run_chunks(lambda r: simulate_trials(protocol, self.seed, r), self.config.trials)
        outcomes = [o for batch in batches for o in batch]
        return summarize_outcomes(outcomes, predicted)

    # --- report assembly ------------------------------------------------------

    def _protocol_results(self, summary: TrialSummary, resources) -> Dict[str, Any]:
        return {
            "trials": summary.trials,
            "successes": summary.successes,
            "empirical_success": summary.empirical_success,
            "predicted_success": summary.predicted_success,
            "half_width": summary.half_width,
            "within_3_sigma": summary.within(3.0),
            "min_fidelity": summary.min_fidelity,
            "resources": resources.to_json_dict(),
        }

    def _protocol_row(self, summary: TrialSummary, d_a: Any, ensemble_size: Any) -> Dict[str, Any]:
        return {
            "command": self.config.command,
            "d": self.config.d,
            "d_a": d_a,
            "ensemble_size": ensemble_size,
            "trials": summary.trials,
            "successes": summary.successes,
            "empirical_success": summary.empirical_success,
            "predicted_success": summary.predicted_success,
            "half_width": summary.half_width,
            "min_fidelity": summary.min_fidelity,
        }

    def _report(self, results: Dict[str, Any], columns: Sequence[str],
                rows: List[Dict[str, Any]], notes: List[str]) -> ExperimentReport:
        return ExperimentReport(command=self.config.command, config=self.config.to_json_dict(),
                                results=results, columns=list(columns), rows=rows, notes=notes)

    # --- commands -------------------------------------------------------------

    async def run_exact(self) -> ExperimentReport:
        target = self.bipartite_target()
        protocol = ExactPreparation(target)
        summary = await self._simulate(protocol)
        results = self._protocol_results(summary, protocol.resources)
        results["flatness_epsilon"] = flatness_epsilon(target)
        notes = ["predicted_success = 1/(d ||rho_B||_inf); failures are outcome 1, not errors"]
        row = self._protocol_row(summary, None, None)
        return self._report(results, PROTOCOL_CSV_COLUMNS, [row], notes)

    async def run_randomized(self) -> ExperimentReport:
        cfg = self.config
        target = self.bipartite_target()
        ensemble = sample_ensemble(cfg.ensemble_size, target.dim, (cfg.d_a, target.partition[1]),
                                   RandomStream(self.seed, SHARED_STREAM))
        protocol = RandomizedPreparation(target, ensemble)
        summary = await self._simulate(protocol)
        results = self._protocol_results(summary, protocol.resources)
        results.update({
            "unrandomized_success": success_probability(target),
            "guaranteed_success_lower_bound": guaranteed_success_lower_bound(cfg.epsilon),
            "distinct_k_used": len(summary.k_counts),
        })
        notes = ["predicted_success is the ensemble mean of 1/(d_B ||rho_B||_inf) over U_k|psi>",
                 "the (1-eps)/(1+eps) guarantee needs d_A >= lemma1_d_a; small d_A may fall short"]
        row = self._protocol_row(summary, cfg.d_a, cfg.ensemble_size)
        return self._report(results, PROTOCOL_CSV_COLUMNS, [row], notes)

    async def run_share(self) -> ExperimentReport:
        cfg = self.config
        target = self.sharing_target()
        _, d_a2, d_b = target.partition
        ensemble = sample_ensemble(cfg.ensemble_size, d_a2 * d_b, (cfg.d_a, d_b),
                                   RandomStream(self.seed, SHARED_STREAM))
        protocol = EntangledSharing(target, ensemble)
        summary = await self._simulate(protocol)
        results = self._protocol_results(summary, protocol.resources)
        results.update({
            "max_marginal_deviation": summary.max_marginal_deviation,
            "guaranteed_success_lower_bound": guaranteed_success_lower_bound(cfg.epsilon),
        })
        notes = ["max_marginal_deviation is the trace distance of the A1 marginals on success"]
        row = self._protocol_row(summary, cfg.d_a, cfg.ensemble_size)
        return self._report(results, PROTOCOL_CSV_COLUMNS, [row], notes)

    async def run_tail(self) -> ExperimentReport:
        cfg = self.config
        psi = self.bipartite_target()
        reports = []
        for d_a in tail_sweep_values(cfg.d_a, cfg.d):
            p = BoundParams(d_a=d_a, d_b=cfg.d, epsilon=cfg.epsilon)
            rng = RandomStream(self.seed, SHARED_STREAM)
            chunks = await self._run_chunks(lambda r: sample_marginal_norms(p, psi, rng, r), cfg.trials)
            reports.append(summarize_tail(p, psi, np.concatenate(chunks), seed=self.seed))
        tails = [r.empirical_tail for r in reports]
        informative = [r for r in reports if not r.vacuous]
        results = {
            "threshold": proof_threshold(cfg.epsilon, cfg.d),
            "non_increasing": is_non_increasing(tails),
            "bound_respected": all(r.empirical_tail <= r.analytic_bound for r in informative),
            "informative_points": len(informative),
        }
        notes = ["tail = Pr_U(||Tr_A U psi U^dag||_inf >= (1 + 3 eps/4)/d_B)",
                 "analytic_bound is mu; vacuous marks mu >= 1"]
        return self._report(results, TAIL_CSV_COLUMNS, [r.csv_row() for r in reports], notes)

    async def run_flat_fraction(self) -> ExperimentReport:
        cfg = self.config
        target = self.bipartite_target()
        d_b = target.partition[1]
        ensemble = sample_ensemble(cfg.ensemble_size, target.dim, (cfg.d_a, d_b),
                                   RandomStream(self.seed, SHARED_STREAM))
        norms = await self._run_chunks(
            lambda r: [marginal_norm(ensemble.members[k], target, ensemble.out_partition) for k in r],
            len(ensemble))
        norms = [n for chunk in norms for n in chunk]
        threshold = statement_threshold(cfg.epsilon, d_b)
        rows = [{"k": k, "marginal_norm": n, "flat": n < threshold} for k, n in enumerate(norms)]
        results = {
            "flat_fraction": float(np.mean([n < threshold for n in norms])),
            "proof_flat_fraction": float(np.mean([n < proof_threshold(cfg.epsilon, d_b) for n in norms])),
            "threshold": threshold,
            "max_marginal_norm": max(norms),
            "guaranteed_flat_fraction": 1.0 - cfg.epsilon,
        }
        notes = ["flat means ||Tr_A U_k psi U_k^dag||_inf < (1 + eps)/d_B"]
        return self._report(results, FLAT_FRACTION_CSV_COLUMNS, rows, notes)

    async def run_bounds(self) -> ExperimentReport:
        cfg = self.config
        dims = lemma1_dimensions(cfg.d, cfg.epsilon)
        threshold = lemma1_n_threshold(dims)
        simplified = threshold.simplified
        sharing = lemma2_n_value(cfg.d, cfg.epsilon)
        mu = mu_bound(dims)
        log2_mu = log_mu_bound(dims) / math.log(2.0)
        results = {
            "lemma1_d_a": dims.d_a,
            "lemma1_n": simplified,
            "threshold_feasible": threshold.feasible,
            "npure_threshold": threshold.threshold,
            "simplified_covers_threshold": simplified is not None and simplified >= threshold.threshold,
            "lemma2_n_log2": sharing.log2_n,
            "lemma2_sufficient_n": lemma2_sufficient_n(cfg.d_a1, cfg.d, cfg.epsilon),
            "mu": mu,
        }
        rows = [
            {"quantity": "lemma1_d_a", "value": dims.d_a, "log2": math.log2(dims.d_a)},
            {"quantity": "lemma1_n", "value": simplified, "log2": threshold.log2_simplified},
            {"quantity": "npure_threshold", "value": threshold.threshold, "log2": threshold.log2_threshold},
            {"quantity": "lemma2_n", "value": sharing.n, "log2": sharing.log2_n},
            {"quantity": "mu", "value": mu, "log2": log2_mu},
        ]
        notes = ["lemma1_n = (120 ln 2/eps^3) d log d at d_A = (112 ln 2/eps^2) d log d",
                 "npure_threshold is the exact union-bound requirement on n at those dimensions"]
        return self._report(results, BOUNDS_CSV_COLUMNS, rows, notes)

    async def run_resources(self) -> ExperimentReport:
        cfg = self.config
        pure = pure_preparation_profile(cfg.l, cfg.epsilon)
        sharing = entangled_sharing_profile(cfg.l, cfg.epsilon)
        results = {
            "pure": pure.to_json_dict(),
            "sharing": sharing.to_json_dict(),
            "near_optimal": holevo_optimality_check(pure),
            "optimality_window": holevo_window(pure),
        }
        rows = profile_table([cfg.l * 10 ** j for j in range(4)], cfg.epsilon)
        notes = [APPROXIMATION_NOTE,
                 "near_optimal: l <= qubits <= l + 3 (log l + log 1/eps + 8) and ebits within the same window"]
        return self._report(results, PROFILE_TABLE_COLUMNS, rows, notes)

    async def run(self) -> ExperimentReport:
        handlers = {
            "exact": self.run_exact,
            "randomized": self.run_randomized,
            "share": self.run_share,
            "tail": self.run_tail,
            "flat-fraction": self.run_flat_fraction,
            "bounds": self.run_bounds,
            "resources": self.run_resources,
        }
        logger.debug("running %s with seed %d (%s)", self.config.command, self.seed, self.config.seed_source)
        return await handlers[self.config.command]()


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Synchronous entry point."""
    return asyncio.run(ExperimentSystem(config).run())
