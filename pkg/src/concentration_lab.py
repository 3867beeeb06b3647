#!/usr/bin/env python3
"""
Concentration bounds and the Monte Carlo experiments that probe them.

Bound formulas come in pairs: a direct evaluation and a log-space twin,
because (10 d_B/eps)^(2 d_B) and (5/delta)^(2m) overflow doubles long before
the parameters get interesting. Logarithms written ``log`` in the formulas
are base 2; the Gaussian-tail constant 14 ln 2 is used as given.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg

from src.linalg_core import (
    SHARED_STREAM,
    RandomStream,
    haar_isometry,
    marginal_of_vector,
    random_observable,
    trace_distance,
)
from src.quantum_states import PureState, basis_state, random_state
from src.sdc_classes import BoundParams
from src.sdc_errors import ArgumentError
from src.sdc_protocols import IsometryEnsemble

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
GAUSSIAN_TAIL_CONSTANT = 14.0 * LN2
# d_A = DIMENSION_CONSTANT/eps^2 d log d, n = ENSEMBLE_CONSTANT/eps^3 d log d
DIMENSION_CONSTANT = 112.0 * LN2
ENSEMBLE_CONSTANT = 120.0 * LN2
SHARING_ENSEMBLE_CONSTANT = 13440.0 * LN2 ** 2
DEFAULT_TRIALS = 2000

TAIL_CSV_COLUMNS = ["d_a", "d_b", "epsilon", "trials", "empirical_tail",
                    "half_width", "analytic_bound", "vacuous"]


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _check_eps(eps: float) -> None:
    if not 0.0 < eps <= 1.0:
        raise ArgumentError(f"epsilon must lie in (0, 1], got {eps}")


# --- single-state and net bounds -------------------------------------------

def log_gaussian_tail_bound(p: BoundParams) -> float:
    return -p.d_a * p.epsilon ** 2 / GAUSSIAN_TAIL_CONSTANT


def gaussian_tail_bound(p: BoundParams) -> float:
    """exp(-d_A eps^2 / (14 ln 2)): tail of Tr(phi Tr_A U psi U^dag) above (1 + eps/2)/d_B."""
    return math.exp(log_gaussian_tail_bound(p))


def log_mu_bound(p: BoundParams) -> float:
    """Natural log of mu."""
    return 2 * p.d_b * math.log(10.0 * p.d_b / p.epsilon) + log_gaussian_tail_bound(p)


def mu_bound(p: BoundParams) -> float:
    """mu = (10 d_B/eps)^(2 d_B) exp(-d_A eps^2/(14 ln 2)), evaluated directly.

    Bounds Pr_U(||Tr_A U psi U^dag||_inf >= (1 + 3 eps/4)/d_B). Values >= 1
    are vacuous. Falls back to the log-space twin when the prefactor
    overflows.
    """
    try:
        value = (10.0 * p.d_b / p.epsilon) ** (2 * p.d_b) * gaussian_tail_bound(p)
    except OverflowError:
        value = _safe_exp(log_mu_bound(p))
    if math.isinf(value) or math.isnan(value):
        value = _safe_exp(log_mu_bound(p))
    return value


def log2_net_size_bound(dim: int, delta: float) -> float:
    if dim < 1:
        raise ArgumentError(f"dimension must be >= 1, got {dim}")
    if not 0.0 < delta <= 2.0:
        raise ArgumentError(f"delta must lie in (0, 2], got {delta}")
    return 2 * dim * math.log2(5.0 / delta)


def net_size_bound(dim: int, delta: float) -> float:
    """Size bound (5/delta)^(2 dim) of a delta-net for pure states in C^dim."""
    log2_size = log2_net_size_bound(dim, delta)
    try:
        return (5.0 / delta) ** (2 * dim)
    except OverflowError:
        return math.inf if log2_size > 0 else 0.0


def divergence(eps: float, mu: float) -> float:
    """Binary relative entropy D(eps || mu) in bits."""
    if not 0.0 < eps < 1.0 or not 0.0 < mu < 1.0:
        raise ArgumentError(f"divergence needs 0 < eps, mu < 1, got eps={eps}, mu={mu}")
    return eps * math.log2(eps / mu) + (1.0 - eps) * math.log2((1.0 - eps) / (1.0 - mu))


def divergence_lower_bound(eps: float, mu: float) -> float:
    """-1 - eps log mu, a lower bound on D(eps || mu)."""
    if not 0.0 < mu < 1.0:
        raise ArgumentError(f"mu must lie in (0, 1), got {mu}")
    return -1.0 - eps * math.log2(mu)


def log2_fixed_state_tail_bound(n: int, eps: float, mu: float) -> float:
    return -n * divergence(eps, mu)


def fixed_state_tail_bound(n: int, eps: float, mu: float) -> float:
    """Chernoff bound 2^(-n D(eps||mu)) on Pr[(1/n) sum X_k > eps] for one state."""
    return 2.0 ** log2_fixed_state_tail_bound(n, eps, mu)


def chernoff_exponent(p: BoundParams) -> float:
    """eps (d_A eps^2/(14 ln 2) - 2 d_B log(10 d_B/eps)) - 1, the per-member exponent."""
    return p.epsilon * (p.d_a * p.epsilon ** 2 / GAUSSIAN_TAIL_CONSTANT
                        - 2 * p.d_b * math.log2(10.0 * p.d_b / p.epsilon)) - 1.0


def log2_closed_form_tail_bound(n: int, p: BoundParams) -> float:
    return -n * chernoff_exponent(p)


def closed_form_tail_bound(n: int, p: BoundParams) -> float:
    """2^(-n chernoff_exponent(p)): the fixed-state bound after D >= -1 - eps log mu.

    Never smaller than the divergence form at mu = mu_bound(p) whenever mu < 1.
    """
    log2_value = log2_closed_form_tail_bound(n, p)
    return math.inf if log2_value > 1023 else 2.0 ** log2_value


def log_net_union_bound(p: BoundParams, n: int) -> float:
    """Natural log of (10 d_B/eps)^(2 d_A d_B) exp(-n * chernoff_exponent).

    Negative means some ensemble of size n is good for every state of the net.
    """
    return 2 * p.d_a * p.d_b * math.log(10.0 * p.d_b / p.epsilon) - n * chernoff_exponent(p)


# --- ensemble sizes ----------------------------------------------------------

@dataclass(frozen=True)
class EnsembleSize:
    n: float
    log2_n: float

    def to_json_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class EnsembleSizeBound:
    """Threshold on n from the union bound; infeasible when the denominator is <= 0"""
    params: BoundParams
    feasible: bool
    threshold: float
    log2_threshold: float
    simplified: Optional[float] = None
    log2_simplified: Optional[float] = None

    def to_json_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["params"] = self.params.to_json_dict()
        return data


def _require_hypothesis(d: int, eps: float) -> None:
    _check_eps(eps)
    if d < 2 or d < 10.0 / eps:
        raise ArgumentError(f"hypothesis d >= 10/eps violated: d={d}, eps={eps}")


def lemma1_dimensions(d: int, eps: float) -> BoundParams:
    """d_A = ceil((112 ln 2/eps^2) d log d), d_B = d."""
    _check_eps(eps)
    if d < 2:
        raise ArgumentError(f"d must be >= 2, got {d}")
    d_a = math.ceil(DIMENSION_CONSTANT / eps ** 2 * d * math.log2(d))
    return BoundParams(d_a=d_a, d_b=d, epsilon=eps)


def lemma1_n_value(d: int, eps: float) -> float:
    """n = (120 ln 2/eps^3) d log d."""
    _require_hypothesis(d, eps)
    return ENSEMBLE_CONSTANT / eps ** 3 * d * math.log2(d)


def lemma1_n_threshold(p: BoundParams) -> EnsembleSizeBound:
    """n > 2 d_A d_B log(10 d_B/eps) / (eps^3 d_A/(14 ln 2) - 2 eps d_B log(10 d_B/eps) - 1).

    The simplified value (120 ln 2/eps^3) d log d is attached whenever
    d_B >= 10/eps and d_A >= lemma1_dimensions(d_B, eps).d_a.
    """
    log_term = math.log2(10.0 * p.d_b / p.epsilon)
    denominator = p.epsilon ** 3 * p.d_a / GAUSSIAN_TAIL_CONSTANT - 2 * p.epsilon * p.d_b * log_term - 1.0
    numerator = 2.0 * p.d_a * p.d_b * log_term

    simplified = log2_simplified = None
    if p.d_b >= 2 and p.d_b >= 10.0 / p.epsilon and p.d_a >= lemma1_dimensions(p.d_b, p.epsilon).d_a:
        simplified = lemma1_n_value(p.d_b, p.epsilon)
        log2_simplified = math.log2(simplified)

    if denominator <= 0.0:
        logger.warning("ensemble-size threshold infeasible for %s (denominator %.4g)", p, denominator)
        return EnsembleSizeBound(p, False, math.inf, math.inf, simplified, log2_simplified)
    threshold = numerator / denominator
    log2_threshold = math.log2(threshold) if threshold > 0 else -math.inf
    return EnsembleSizeBound(p, True, threshold, log2_threshold, simplified, log2_simplified)


def lemma2_n_value(d: int, eps: float) -> EnsembleSize:
    """n = (13440 (ln 2)^2/eps^5) d^3 (log d)^2 for sharing entangled states."""
    _require_hypothesis(d, eps)
    log2_n = (math.log2(SHARING_ENSEMBLE_CONSTANT) - 5 * math.log2(eps)
              + 3 * math.log2(d) + 2 * math.log2(math.log2(d)))
    return EnsembleSize(n=math.inf if log2_n > 1023 else 2.0 ** log2_n, log2_n=log2_n)


def lemma2_sufficient_n(d_a1: int, d: int, eps: float) -> float:
    """d_A1 (120 ln 2/eps^3) d log d, before compressing A1 to d_A1 <= d^3."""
    if d_a1 < 1:
        raise ArgumentError(f"d_A1 must be >= 1, got {d_a1}")
    return d_a1 * lemma1_n_value(d, eps)


# --- observable deviation vs trace distance ------------------------------------

@dataclass(frozen=True)
class Fact1Check:
    samples: int
    delta: float
    max_trace_norm: float
    max_gap: float
    holds: bool


def verify_fact1(dim: int, delta: float, samples: int, rng: RandomStream) -> Fact1Check:
    """Check |Tr((eta - eta~) O)| <= ||eta - eta~||_1 / 2 <= delta/2 on sampled pairs.

    eta~ is a perturbation of eta shrunk until the pair is delta-close;
    O is a random operator with 0 <= O <= I.
    """
    if dim < 1 or samples < 1:
        raise ArgumentError("dim and samples must be >= 1")
    if not 0.0 < delta <= 2.0:
        raise ArgumentError(f"delta must lie in (0, 2], got {delta}")
    max_norm = max_gap = 0.0
    holds = True
    for s in range(samples):
        sub = rng.for_trial(s)
        eta = random_state((dim,), sub).amplitudes
        noise = sub.standard_normal_complex((dim,))
        scale = delta
        while True:
            tilde = eta + scale * noise
            tilde = tilde / np.linalg.norm(tilde)
            diff = np.outer(eta, eta.conj()) - np.outer(tilde, tilde.conj())
            trace_norm = 2.0 * trace_distance(diff + np.eye(dim) / dim, np.eye(dim) / dim)
            if trace_norm <= delta:
                break
            scale /= 2.0
        observable = random_observable(dim, sub)
        gap = abs(np.trace(diff @ observable))
        max_norm = max(max_norm, trace_norm)
        max_gap = max(max_gap, gap)
        if gap > trace_norm / 2.0 + 1e-12 or gap > delta / 2.0 + 1e-12:
            holds = False
    return Fact1Check(samples, delta, max_norm, max_gap, holds)


# --- flatness of randomized states ------------------------------------------

def proof_threshold(eps: float, d_b: int) -> float:
    """(1 + 3 eps/4)/d_B, the indicator threshold used inside the proofs."""
    return (1.0 + 0.75 * eps) / d_b


def statement_threshold(eps: float, d_b: int) -> float:
    """(1 + eps)/d_B, the flatness threshold of the ensemble guarantees."""
    return (1.0 + eps) / d_b


def marginal_norm(isometry: np.ndarray, psi, out_partition: Sequence[int]) -> float:
    """||Tr_A V psi V^dag||_inf for a pure input psi."""
    amplitudes = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi)
    rho_b = marginal_of_vector(isometry @ amplitudes, tuple(out_partition), keep=[1])
    return float(scipy.linalg.eigvalsh(rho_b)[-1])


def _ensemble_norms(ensemble: IsometryEnsemble, psi: PureState) -> np.ndarray:
    if psi.dim != ensemble.in_dim:
        raise ArgumentError(f"state has dimension {psi.dim}, ensemble expects {ensemble.in_dim}")
    return np.array([marginal_norm(v, psi, ensemble.out_partition) for v in ensemble.members])


def flatness_indicators(ensemble: IsometryEnsemble, psi: PureState, eps: float,
                        threshold: Optional[float] = None) -> np.ndarray:
    """X_k = 1 when ||Tr_A U_k psi U_k^dag||_inf >= threshold (default (1+eps)/d)."""
    _check_eps(eps)
    if threshold is None:
        threshold = statement_threshold(eps, ensemble.out_partition[1])
    return (_ensemble_norms(ensemble, psi) >= threshold).astype(int)


def ensemble_flat_fraction(ensemble: IsometryEnsemble, psi: PureState, eps: float,
                           threshold: Optional[float] = None) -> float:
    """Fraction of members k for which U_k|psi> is eps-flat on B."""
    return 1.0 - float(np.mean(flatness_indicators(ensemble, psi, eps, threshold)))


@dataclass
class Lemma2Check:
    """Flat fraction on A1 A2 vs B plus the convexity surrogate per member"""
    flat_fraction: float
    true_norms: List[float]
    surrogate_norms: List[float]

    @property
    def chain_holds(self) -> bool:
        return all(t <= s + 1e-9 for t, s in zip(self.true_norms, self.surrogate_norms))

    @property
    def max_violation(self) -> float:
        return max(t - s for t, s in zip(self.true_norms, self.surrogate_norms))


def lemma2_flat_fraction(ensemble: IsometryEnsemble, psi: PureState, eps: float,
                         threshold: Optional[float] = None) -> Lemma2Check:
    """Flat fraction of (I_A1 (x) U_k)|psi> and the eigenvector-max surrogate.

    The surrogate is max_j ||Tr_A2 U_k eta_j U_k^dag||_inf over the
    eigenvectors eta_j of Tr_A1 psi with nonzero weight; convexity of the
    operator norm makes it an upper bound on the true marginal norm.
    """
    _check_eps(eps)
    if len(psi.partition) != 3:
        raise ArgumentError(f"expected partition (d_A1, d_A2, d_B), got {psi.partition}")
    d_a1, d_a2, d_b = psi.partition
    if d_a2 * d_b != ensemble.in_dim:
        raise ArgumentError(f"ensemble acts on dimension {ensemble.in_dim}, A2 B has {d_a2 * d_b}")
    d_a2_out, d = ensemble.out_partition
    if threshold is None:
        threshold = statement_threshold(eps, d)

    rho_a2b = marginal_of_vector(psi.amplitudes, psi.partition, keep=[1, 2])
    weights, vectors = scipy.linalg.eigh(rho_a2b)
    support = [vectors[:, j] for j in range(len(weights)) if weights[j] > 1e-12]

    rows = psi.amplitudes.reshape(d_a1, -1)
    true_norms, surrogate_norms = [], []
    for v in ensemble.members:
        joint = (rows @ v.T).reshape(-1)
        rho_b = marginal_of_vector(joint, (d_a1 * d_a2_out, d), keep=[1])
        true_norms.append(float(scipy.linalg.eigvalsh(rho_b)[-1]))
        surrogate_norms.append(max(marginal_norm(v, eta, ensemble.out_partition) for eta in support))
    flat = float(np.mean([n < threshold for n in true_norms]))
    return Lemma2Check(flat, true_norms, surrogate_norms)


# --- tail experiment ---------------------------------------------------------

@dataclass
class ConcentrationReport:
    """Empirical tail of ||Tr_A U psi U^dag||_inf next to the mu bound"""
    params: BoundParams
    empirical_tail: float
    analytic_bound: float
    trials: int
    per_state_flat_fraction: List[float] = field(default_factory=list)
    half_width: float = 0.0
    vacuous: bool = True
    threshold: float = 0.0
    input_dim: int = 0
    seed: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.empirical_tail <= 1.0:
            raise ArgumentError(f"empirical tail {self.empirical_tail} outside [0, 1]")
        if self.trials < 1:
            raise ArgumentError("a report needs at least one trial")

    def to_json_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["params"] = self.params.to_json_dict()
        return data

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "ConcentrationReport":
        values = dict(data)
        values["params"] = BoundParams.from_json_dict(values["params"])
        values["per_state_flat_fraction"] = list(values.get("per_state_flat_fraction", []))
        return cls(**values)

    def csv_row(self) -> Dict[str, Any]:
        return {
            "d_a": self.params.d_a,
            "d_b": self.params.d_b,
            "epsilon": self.params.epsilon,
            "trials": self.trials,
            "empirical_tail": self.empirical_tail,
            "half_width": self.half_width,
            "analytic_bound": self.analytic_bound,
            "vacuous": self.vacuous,
        }


def _tail_inputs(p: BoundParams, psi: Optional[PureState], input_dim: Optional[int]) -> PureState:
    if psi is None:
        dim = input_dim if input_dim is not None else p.d_b ** 2
        psi = basis_state(0, (dim,))
    elif input_dim is not None and psi.dim != input_dim:
        raise ArgumentError(f"state has dimension {psi.dim}, input_dim is {input_dim}")
    if p.d_a * p.d_b < psi.dim:
        raise ArgumentError(f"cannot embed dimension {psi.dim} into {p.d_a}x{p.d_b}")
    return psi


def sample_marginal_norms(p: BoundParams, psi: PureState, rng: RandomStream,
                          trials: range) -> np.ndarray:
    """||Tr_A V psi V^dag||_inf for a fresh Haar isometry per trial index."""
    out_dim = p.d_a * p.d_b
    norms = np.empty(len(trials))
    for i, t in enumerate(trials):
        v = haar_isometry(psi.dim, out_dim, rng.for_trial(t))
        norms[i] = marginal_norm(v, psi, (p.d_a, p.d_b))
    return norms


def summarize_tail(p: BoundParams, psi: PureState, norms: np.ndarray,
                   seed: Optional[int] = None) -> ConcentrationReport:
    trials = len(norms)
    tail = float(np.mean(norms >= proof_threshold(p.epsilon, p.d_b)))
    flat = float(np.mean(norms < statement_threshold(p.epsilon, p.d_b)))
    bound = mu_bound(p)
    vacuous = not bound < 1.0
    if vacuous:
        logger.debug("mu bound %.4g is vacuous at %s", bound, p)
    return ConcentrationReport(
        params=p,
        empirical_tail=tail,
        analytic_bound=bound,
        trials=trials,
        per_state_flat_fraction=[flat],
        half_width=3.0 * math.sqrt(tail * (1.0 - tail) / trials),
        vacuous=vacuous,
        threshold=proof_threshold(p.epsilon, p.d_b),
        input_dim=psi.dim,
        seed=seed,
    )


def flatness_tail_experiment(p: BoundParams, trials: int, rng: RandomStream,
                             psi: Optional[PureState] = None,
                             input_dim: Optional[int] = None) -> ConcentrationReport:
    """Monte Carlo estimate of Pr_U(||Tr_A U psi U^dag||_inf >= (1 + 3 eps/4)/d_B).

    ``psi`` defaults to the basis state |0> of dimension ``input_dim``
    (d_B^2 when not given), the least entangled input there is.
    """
    if trials < 100:
        raise ArgumentError(f"tail experiments need at least 100 trials, got {trials}")
    psi = _tail_inputs(p, psi, input_dim)
    norms = sample_marginal_norms(p, psi, rng, range(trials))
    return summarize_tail(p, psi, norms, seed=rng.seed)


def tail_sweep(d_a_values: Sequence[int], d_b: int, eps: float, trials: int, seed: int,
               psi: Optional[PureState] = None, input_dim: Optional[int] = None) -> List[ConcentrationReport]:
    """flatness_tail_experiment at each d_A, every point on stream (seed, 0)."""
    reports = []
    for d_a in d_a_values:
        p = BoundParams(d_a=int(d_a), d_b=d_b, epsilon=eps)
        reports.append(flatness_tail_experiment(p, trials, RandomStream(seed, SHARED_STREAM), psi, input_dim))
    return reports


def is_non_increasing(values: Sequence[float]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))
