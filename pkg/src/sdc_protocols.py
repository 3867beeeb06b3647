#!/usr/bin/env python3
"""
Superdense coding of quantum states: party-level protocol simulations

Three protocols are simulated:

* exact probabilistic preparation: Alice applies X to her half of |Phi_d>
  through the generalized measurement {E0 = X/||X||, E1 = sqrt(I - E0^dag E0)}
  and sends the register plus one qubit carrying the outcome;
* randomized preparation: both parties pick U_k from a shared ensemble,
  Alice prepares U_k|psi> exactly as above and Bob undoes U_k;
* entangled sharing: the same idea for a state on A1 A2 B where Alice keeps
  A1, so the ensemble only acts on A2 B.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.linalg_core import (
    PRIVATE_STREAM,
    SHARED_STREAM,
    STRUCTURAL_TOL,
    RandomStream,
    as_complex_matrix,
    fidelity,
    haar_isometry,
    marginal_of_vector,
    operator_norm,
    sqrt_psd,
    trace_distance,
)
from src.quantum_states import EncodingMatrix, PureState, encoding_matrix, reduced_b
from src.sdc_classes import ResourceTally
from src.sdc_errors import ArgumentError

logger = logging.getLogger(__name__)

KRAUS_TOL = 1e-9
# below this a branch probability is treated as zero
_NEGLIGIBLE = 1e-15


@dataclass(frozen=True)
class KrausPair:
    """Two-outcome generalized measurement; outcome 0 applies X/||X||"""
    e0: np.ndarray
    e1: np.ndarray

    def __post_init__(self):
        e0 = as_complex_matrix(self.e0, "E0")
        e1 = as_complex_matrix(self.e1, "E1")
        if e1.shape != (e0.shape[1], e0.shape[1]):
            raise ArgumentError(f"E1 must be {e0.shape[1]}x{e0.shape[1]}, got {e1.shape}")
        if self.completeness_error(e0, e1) > KRAUS_TOL:
            raise ArgumentError("Kraus pair is not complete: E0^dag E0 + E1^dag E1 != I")
        object.__setattr__(self, "e0", e0)
        object.__setattr__(self, "e1", e1)

    @staticmethod
    def completeness_error(e0: np.ndarray, e1: np.ndarray) -> float:
        total = e0.conj().T @ e0 + e1.conj().T @ e1
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))


@dataclass(frozen=True)
class IsometryEnsemble:
    """The shared set {U_k}; every member maps C^in_dim into C^dA (x) C^dB"""
    members: Tuple[np.ndarray, ...]
    in_dim: int
    out_partition: Tuple[int, int]

    def __post_init__(self):
        if not self.members:
            raise ArgumentError("ensemble must contain at least one isometry")
        out_partition = tuple(int(d) for d in self.out_partition)
        if len(out_partition) != 2:
            raise ArgumentError(f"out_partition must be (d_A, d_B), got {out_partition}")
        shape = (out_partition[0] * out_partition[1], int(self.in_dim))
        members = tuple(as_complex_matrix(m, "ensemble member") for m in self.members)
        for k, v in enumerate(members):
            if v.shape != shape:
                raise ArgumentError(f"member {k} has shape {v.shape}, expected {shape}")
            if np.max(np.abs(v.conj().T @ v - np.eye(shape[1]))) > STRUCTURAL_TOL:
                raise ArgumentError(f"member {k} is not an isometry")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "out_partition", out_partition)

    def __len__(self):
        return len(self.members)

    @property
    def shared_random_bits(self) -> float:
        return math.log2(len(self.members))

    @classmethod
    def trivial(cls, in_dim: int, out_partition: Sequence[int]) -> "IsometryEnsemble":
        """Single identity embedding (the unrandomized protocol)."""
        d_a, d_b = out_partition
        if d_a * d_b < in_dim:
            raise ArgumentError(f"cannot embed dimension {in_dim} into {d_a}x{d_b}")
        return cls((np.eye(d_a * d_b, in_dim, dtype=np.complex128),), in_dim, (d_a, d_b))


@dataclass
class ProtocolOutcome:
    """What one protocol run produced"""
    succeeded: bool
    measurement_outcome: int
    resources: ResourceTally
    success_probability: float
    chosen_k: Optional[int] = None
    final_state: Optional[PureState] = None
    fidelity_to_target: Optional[float] = None
    failed_state: Optional[PureState] = None
    marginal_deviation: Optional[float] = None

    def __post_init__(self):
        if self.succeeded and (self.final_state is None or self.fidelity_to_target is None):
            raise ArgumentError("a successful outcome must carry its final state and fidelity")

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "succeeded": self.succeeded,
            "chosen_k": self.chosen_k,
            "measurement_outcome": self.measurement_outcome,
            "success_probability": self.success_probability,
            "final_state": self.final_state.to_json_dict() if self.final_state else None,
            "fidelity_to_target": self.fidelity_to_target,
            "failed_state": self.failed_state.to_json_dict() if self.failed_state else None,
            "marginal_deviation": self.marginal_deviation,
            "resources": self.resources.to_json_dict(),
        }


def build_kraus(x) -> KrausPair:
    """E0 = X/||X||_inf, E1 = sqrt(I - E0^dag E0)."""
    entries = x.entries if isinstance(x, EncodingMatrix) else as_complex_matrix(x, "X")
    norm = operator_norm(entries)
    if norm == 0.0:
        raise ArgumentError("cannot build a measurement from the zero matrix")
    e0 = entries / norm
    e1 = sqrt_psd(np.eye(entries.shape[1]) - e0.conj().T @ e0)
    return KrausPair(e0, e1)


def success_probability(psi: PureState) -> float:
    """1 / (d ||rho_B||_inf), between 1/d and 1."""
    d = psi.partition[1] if psi.is_bipartite else None
    if d is None:
        raise ArgumentError(f"expected a bipartite state, got partition {psi.partition}")
    return 1.0 / (d * reduced_b(psi).max_eigenvalue())


def guaranteed_success_lower_bound(eps: float) -> float:
    """Overall success guarantee (1 - eps)/(1 + eps) of a good ensemble."""
    if not 0.0 < eps <= 1.0:
        raise ArgumentError(f"epsilon must lie in (0, 1], got {eps}")
    return (1.0 - eps) / (1.0 + eps)


class ExactPreparation:
    """Exact probabilistic preparation of one bipartite target.

    The Kraus pair and both branch states are computed once; ``run`` only
    samples the measurement outcome.
    """

    def __init__(self, target: PureState, shared_dim: Optional[int] = None,
                 transmitted_dim: Optional[int] = None):
        if not target.is_bipartite:
            raise ArgumentError(f"exact preparation needs a bipartite target, got {target.partition}")
        d_out, d = target.partition
        if shared_dim is not None and shared_dim != d:
            raise ArgumentError(f"target needs |Phi_{d}> but the parties share |Phi_{shared_dim}>")
        self.target = target
        self.d = d
        self.d_out = d_out
        self.kraus = build_kraus(encoding_matrix(target))

        # (M (x) I)|Phi_d> flattens to vec(M)/sqrt(d)
        branch0 = self.kraus.e0.reshape(-1) / math.sqrt(d)
        branch1 = self.kraus.e1.reshape(-1) / math.sqrt(d)
        self.p0 = float(np.vdot(branch0, branch0).real)
        self.p1 = float(np.vdot(branch1, branch1).real)
        self._branch0 = branch0
        self._branch1 = branch1
        self._final = PureState(branch0 / math.sqrt(self.p0), (d_out, d))
        self._fidelity = fidelity(self._final.amplitudes, target.amplitudes)
        self._failed = None
        if self.p1 > _NEGLIGIBLE:
            self._failed = PureState(branch1 / math.sqrt(self.p1), (d, d))

        sent = d_out if transmitted_dim is None else transmitted_dim
        self.resources = ResourceTally(qubits_sent=math.log2(sent) + 1.0,
                                       ebits_consumed=math.log2(d))

    def run(self, private_rng: RandomStream) -> ProtocolOutcome:
        outcome = 0 if private_rng.uniform() < self.p0 else 1
        if outcome == 0:
            return ProtocolOutcome(succeeded=True, measurement_outcome=0,
                                   resources=self.resources, success_probability=self.p0,
                                   final_state=self._final, fidelity_to_target=self._fidelity)
        return ProtocolOutcome(succeeded=False, measurement_outcome=1,
                               resources=self.resources, success_probability=self.p0,
                               failed_state=self._failed)

    def run_trial(self, shared_rng: RandomStream, private_rng: RandomStream) -> ProtocolOutcome:
        return self.run(private_rng)

    @property
    def predicted_success(self) -> float:
        return self.p0


def run_exact_preparation(target: PureState, rng: RandomStream,
                          shared_dim: Optional[int] = None) -> ProtocolOutcome:
    return ExactPreparation(target, shared_dim=shared_dim).run(rng)


def sample_ensemble(n: int, in_dim: int, out_partition: Sequence[int],
                    rng: RandomStream) -> IsometryEnsemble:
    """n i.i.d. Haar isometries C^in_dim -> C^dA (x) C^dB.

    Both parties calling this with equal streams get identical ensembles.
    """
    if n < 1:
        raise ArgumentError(f"ensemble size must be >= 1, got {n}")
    d_a, d_b = (int(d) for d in out_partition)
    if d_a * d_b < in_dim:
        raise ArgumentError(f"cannot embed dimension {in_dim} into {d_a}x{d_b}")
    members = tuple(haar_isometry(in_dim, d_a * d_b, rng) for _ in range(n))
    logger.debug("sampled %d isometries %d -> %dx%d", n, in_dim, d_a, d_b)
    return IsometryEnsemble(members, in_dim, (d_a, d_b))


def _draw_k(ensemble: IsometryEnsemble, shared_rng: RandomStream, forced_k: Optional[int]) -> int:
    n = len(ensemble)
    if forced_k is None:
        return shared_rng.integer(n)
    if not 0 <= forced_k < n:
        raise ArgumentError(f"forced k={forced_k} outside ensemble of size {n}")
    return int(forced_k)


class RandomizedPreparation:
    """Randomized preparation of a d^2-dimensional target"""

    def __init__(self, target: PureState, ensemble: IsometryEnsemble):
        if target.dim != ensemble.in_dim:
            raise ArgumentError(f"target has dimension {target.dim}, ensemble expects {ensemble.in_dim}")
        d_a, d = ensemble.out_partition
        if d_a < d:
            raise ArgumentError(f"need d_A >= d, got d_A={d_a}, d={d}")
        self.target = target
        self.ensemble = ensemble
        self.d_a = d_a
        self.d = d
        self._prepared: Dict[int, ExactPreparation] = {}
        self.resources = ResourceTally(qubits_sent=math.log2(d_a) + 1.0,
                                       ebits_consumed=math.log2(d),
                                       shared_random_bits=ensemble.shared_random_bits)

    def randomized_state(self, k: int) -> PureState:
        """U_k|target> with partition (d_A, d)."""
        return PureState(self.ensemble.members[k] @ self.target.amplitudes, self.ensemble.out_partition)

    def prepared(self, k: int) -> ExactPreparation:
        if k not in self._prepared:
            self._prepared[k] = ExactPreparation(self.randomized_state(k))
        return self._prepared[k]

    def run(self, shared_rng: RandomStream, private_rng: RandomStream,
            forced_k: Optional[int] = None) -> ProtocolOutcome:
        k = _draw_k(self.ensemble, shared_rng, forced_k)
        inner = self.prepared(k).run(private_rng)
        if not inner.succeeded:
            return ProtocolOutcome(succeeded=False, measurement_outcome=1, chosen_k=k,
                                   resources=self.resources,
                                   success_probability=inner.success_probability,
                                   failed_state=inner.failed_state)
        # Bob undoes U_k
        v = self.ensemble.members[k]
        bob = PureState(v.conj().T @ inner.final_state.amplitudes, self.target.partition)
        return ProtocolOutcome(succeeded=True, measurement_outcome=0, chosen_k=k,
                               resources=self.resources,
                               success_probability=inner.success_probability,
                               final_state=bob,
                               fidelity_to_target=fidelity(bob.amplitudes, self.target.amplitudes))

    def run_trial(self, shared_rng: RandomStream, private_rng: RandomStream) -> ProtocolOutcome:
        return self.run(shared_rng, private_rng)

    @property
    def predicted_success(self) -> float:
        """Mean over k of the exact-step success probability."""
        return float(np.mean([self.prepared(k).p0 for k in range(len(self.ensemble))]))


def run_randomized_preparation(target: PureState, ensemble: IsometryEnsemble,
                               shared_rng: RandomStream, private_rng: RandomStream,
                               forced_k: Optional[int] = None) -> ProtocolOutcome:
    return RandomizedPreparation(target, ensemble).run(shared_rng, private_rng, forced_k)


def randomized_success_probability(target: PureState, ensemble: IsometryEnsemble) -> float:
    return RandomizedPreparation(target, ensemble).predicted_success


class EntangledSharing:
    """Sharing a state on A1 A2 B; the ensemble acts on A2 B only.

    Alice keeps A1 and transmits A2, Bob ends up holding A2 B.
    """

    def __init__(self, target: PureState, ensemble: IsometryEnsemble):
        if len(target.partition) != 3:
            raise ArgumentError(f"sharing needs partition (d_A1, d_A2, d_B), got {target.partition}")
        d_a1, d_a2, d_b = target.partition
        if ensemble.in_dim != d_a2 * d_b:
            raise ArgumentError(f"ensemble expects dimension {ensemble.in_dim}, A2 B has {d_a2 * d_b}")
        d_a2_out, d = ensemble.out_partition
        if d_a1 > d_a2_out * d:
            # the A1 basis can always be compressed locally first
            raise ArgumentError(f"need d_A1 <= d_A2 * d_B = {d_a2_out * d}, got d_A1={d_a1}")
        self.target = target
        self.ensemble = ensemble
        self.d_a1 = d_a1
        self.d_a2_out = d_a2_out
        self.d = d
        self._prepared: Dict[int, ExactPreparation] = {}
        self._target_a1 = marginal_of_vector(target.amplitudes, target.partition, keep=[0])
        self.resources = ResourceTally(qubits_sent=math.log2(d_a2_out) + 1.0,
                                       ebits_consumed=math.log2(d),
                                       shared_random_bits=ensemble.shared_random_bits)

    def randomized_state(self, k: int) -> PureState:
        """(I_A1 (x) U_k)|target> with partition (d_A1, d_A2', d)."""
        rows = self.target.amplitudes.reshape(self.d_a1, -1)
        out = rows @ self.ensemble.members[k].T
        return PureState(out.reshape(-1), (self.d_a1, self.d_a2_out, self.d))

    def prepared(self, k: int) -> ExactPreparation:
        if k not in self._prepared:
            joint = self.randomized_state(k)
            # X acts on A1 A2 jointly
            bipartite = joint.with_partition((self.d_a1 * self.d_a2_out, self.d))
            self._prepared[k] = ExactPreparation(bipartite, transmitted_dim=self.d_a2_out)
        return self._prepared[k]

    def run(self, shared_rng: RandomStream, private_rng: RandomStream,
            forced_k: Optional[int] = None) -> ProtocolOutcome:
        k = _draw_k(self.ensemble, shared_rng, forced_k)
        inner = self.prepared(k).run(private_rng)
        if not inner.succeeded:
            return ProtocolOutcome(succeeded=False, measurement_outcome=1, chosen_k=k,
                                   resources=self.resources,
                                   success_probability=inner.success_probability,
                                   failed_state=inner.failed_state)
        rows = inner.final_state.amplitudes.reshape(self.d_a1, -1)
        undone = rows @ self.ensemble.members[k].conj()
        final = PureState(undone.reshape(-1), self.target.partition)
        a1 = marginal_of_vector(final.amplitudes, final.partition, keep=[0])
        return ProtocolOutcome(succeeded=True, measurement_outcome=0, chosen_k=k,
                               resources=self.resources,
                               success_probability=inner.success_probability,
                               final_state=final,
                               fidelity_to_target=fidelity(final.amplitudes, self.target.amplitudes),
                               marginal_deviation=trace_distance(a1, self._target_a1))

    def run_trial(self, shared_rng: RandomStream, private_rng: RandomStream) -> ProtocolOutcome:
        return self.run(shared_rng, private_rng)

    @property
    def predicted_success(self) -> float:
        return float(np.mean([self.prepared(k).p0 for k in range(len(self.ensemble))]))


def run_entangled_sharing(target: PureState, ensemble: IsometryEnsemble,
                          shared_rng: RandomStream, private_rng: RandomStream,
                          forced_k: Optional[int] = None) -> ProtocolOutcome:
    return EntangledSharing(target, ensemble).run(shared_rng, private_rng, forced_k)


def simulate_trials(protocol, seed: int, trials: range) -> List[ProtocolOutcome]:
    """Run ``protocol`` for each trial index; trial t uses streams (seed, 0, t) and (seed, 1, t)."""
    outcomes = []
    for t in trials:
        shared = RandomStream(seed, SHARED_STREAM, t)
        private = RandomStream(seed, PRIVATE_STREAM, t)
        outcomes.append(protocol.run_trial(shared, private))
    return outcomes


@dataclass
class TrialSummary:
    """Aggregate of a Monte Carlo batch"""
    trials: int
    successes: int
    predicted_success: float
    min_fidelity: Optional[float] = None
    max_marginal_deviation: Optional[float] = None
    k_counts: Dict[int, int] = field(default_factory=dict)

    @property
    def empirical_success(self) -> float:
        return self.successes / self.trials

    @property
    def standard_error(self) -> float:
        p = self.predicted_success
        return math.sqrt(p * (1.0 - p) / self.trials)

    @property
    def half_width(self) -> float:
        """Three binomial standard errors around the prediction."""
        return 3.0 * self.standard_error

    def within(self, sigmas: float = 3.0) -> bool:
        return abs(self.empirical_success - self.predicted_success) <= sigmas * self.standard_error + 1e-12


def summarize_outcomes(outcomes: Sequence[ProtocolOutcome], predicted_success: float) -> TrialSummary:
    if not outcomes:
        raise ArgumentError("cannot summarize an empty batch")
    successes = [o for o in outcomes if o.succeeded]
    k_counts: Dict[int, int] = {}
    for o in outcomes:
        if o.chosen_k is not None:
            k_counts[o.chosen_k] = k_counts.get(o.chosen_k, 0) + 1
    deviations = [o.marginal_deviation for o in successes if o.marginal_deviation is not None]
    return TrialSummary(
        trials=len(outcomes),
        successes=len(successes),
        predicted_success=predicted_success,
        min_fidelity=min((o.fidelity_to_target for o in successes), default=None),
        max_marginal_deviation=max(deviations, default=None),
        k_counts=k_counts,
    )
