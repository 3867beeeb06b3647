#!/usr/bin/env python3
"""
Pure states, encoding matrices and entanglement flatness.

A bipartite state |psi> on C^d_out (x) C^d is written as (X (x) I)|Phi_d>,
with x_ij = sqrt(d) * psi_ij. The matrix X is what Alice has to apply to
her half of the maximally entangled state.
"""

import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.linalg_core import (
    NORMALIZATION_TOL,
    STRUCTURAL_TOL,
    DensityMatrix,
    RandomStream,
    as_complex_matrix,
    haar_isometry,
    marginal_of_vector,
    partial_trace,
)
from src.sdc_errors import ArgumentError, InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PureState:
    """Unit vector together with its subsystem dims (leftmost factor first)"""
    amplitudes: np.ndarray
    partition: Tuple[int, ...]

    def __post_init__(self):
        partition = tuple(int(d) for d in self.partition)
        if not partition or any(d < 1 for d in partition):
            raise ArgumentError(f"partition must be a nonempty sequence of positive dims, got {partition}")
        v = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if v.size != math.prod(partition):
            raise ArgumentError(f"{v.size} amplitudes do not fit partition {partition}")
        if not np.all(np.isfinite(v)):
            raise ArgumentError("amplitudes contain NaN or Inf")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise ArgumentError(f"state is not normalized (norm {norm:.12g})")
        object.__setattr__(self, "amplitudes", v / norm)
        object.__setattr__(self, "partition", partition)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def is_bipartite(self) -> bool:
        return len(self.partition) == 2

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix.from_vector(self.amplitudes)

    def with_partition(self, partition: Sequence[int]) -> "PureState":
        return PureState(self.amplitudes, tuple(partition))

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "partition": list(self.partition),
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "PureState":
        amplitudes = [complex(float(re), float(im)) for re, im in data["amplitudes"]]
        return cls(np.array(amplitudes), tuple(data["partition"]))

    def __str__(self):
        return f"PureState(partition={self.partition})"


@dataclass(frozen=True)
class EncodingMatrix:
    """X with |psi> = (X (x) I)|Phi_d>; rectangular d_out x d_in in general"""
    entries: np.ndarray

    def __post_init__(self):
        x = as_complex_matrix(self.entries, "encoding matrix")
        frob = float(np.sum(np.abs(x) ** 2))
        if abs(frob - x.shape[1]) > NORMALIZATION_TOL:
            raise ArgumentError(f"||X||_F^2 = {frob:.12g}, expected d_in = {x.shape[1]}")
        object.__setattr__(self, "entries", x)

    @property
    def d_out(self) -> int:
        return self.entries.shape[0]

    @property
    def d_in(self) -> int:
        return self.entries.shape[1]


def _require_bipartite(psi: PureState) -> Tuple[int, int]:
    if not psi.is_bipartite:
        raise ArgumentError(f"expected a bipartite state, got partition {psi.partition}")
    return psi.partition


def max_entangled(d: int) -> PureState:
    """|Phi_d> = sum_i |i>|i> / sqrt(d) with partition (d, d)."""
    if d < 1:
        raise ArgumentError(f"d must be >= 1, got {d}")
    v = np.zeros(d * d, dtype=np.complex128)
    v[np.arange(d) * d + np.arange(d)] = 1.0 / math.sqrt(d)
    return PureState(v, (d, d))


def basis_state(index: int, partition: Sequence[int]) -> PureState:
    partition = tuple(partition)
    total = math.prod(partition)
    if not 0 <= index < total:
        raise ArgumentError(f"basis index {index} out of range for dimension {total}")
    v = np.zeros(total, dtype=np.complex128)
    v[index] = 1.0
    return PureState(v, partition)


def tensor(a: PureState, b: PureState) -> PureState:
    return PureState(np.kron(a.amplitudes, b.amplitudes), a.partition + b.partition)


def product_state(vectors: Sequence) -> PureState:
    """Tensor product of single-factor unit vectors."""
    if not vectors:
        raise ArgumentError("need at least one factor")
    amplitudes = np.ones(1, dtype=np.complex128)
    for v in vectors:
        amplitudes = np.kron(amplitudes, np.asarray(v, dtype=np.complex128).reshape(-1))
    return PureState(amplitudes, tuple(np.asarray(v).size for v in vectors))


def encoding_matrix(psi: PureState) -> EncodingMatrix:
    d_out, d = _require_bipartite(psi)
    return EncodingMatrix(math.sqrt(d) * psi.amplitudes.reshape(d_out, d))


def state_from_encoding(x, d: int) -> PureState:
    """(X (x) I)|Phi_d>, i.e. psi_ij = x_ij / sqrt(d)."""
    if not isinstance(x, EncodingMatrix):
        x = EncodingMatrix(x)
    if x.d_in != d:
        raise ArgumentError(f"encoding matrix has d_in={x.d_in}, expected {d}")
    v = x.entries.reshape(-1) / math.sqrt(d)
    return PureState(v / np.linalg.norm(v), (x.d_out, d))


def reduced_b(psi: PureState, check: bool = False) -> DensityMatrix:
    """rho_B = Tr_A |psi><psi| = X^T X^* / d.

    With ``check`` the result is compared against the direct partial trace.
    """
    _, d = _require_bipartite(psi)
    x = encoding_matrix(psi).entries
    rho = x.T @ x.conj() / d
    rho = (rho + rho.conj().T) / 2
    result = DensityMatrix(rho)
    if check:
        direct = partial_trace(psi.density_matrix(), psi.partition, keep=[1])
        deviation = float(np.max(np.abs(direct.entries - result.entries)))
        if deviation > STRUCTURAL_TOL:
            raise ArgumentError(f"X^T X^*/d deviates from Tr_A by {deviation:.3e}")
    return result


def flatness_epsilon(psi: PureState) -> float:
    """epsilon = d ||rho_B||_inf - 1, in [0, d - 1]."""
    _, d = _require_bipartite(psi)
    rho_b = marginal_of_vector(psi.amplitudes, psi.partition, keep=[1])
    largest = float(scipy.linalg.eigvalsh(rho_b)[-1])
    eps = d * largest - 1.0
    if -1e-9 <= eps < 0.0:
        eps = 0.0
    return eps


def schmidt_coefficients(psi: PureState) -> np.ndarray:
    """Schmidt coefficients (descending) of a bipartite state."""
    d_out, d = _require_bipartite(psi)
    return scipy.linalg.svdvals(psi.amplitudes.reshape(d_out, d))


def random_state(partition: Sequence[int], rng: RandomStream) -> PureState:
    """Globally Haar-random unit vector (a random isometry column)."""
    partition = tuple(partition)
    if not partition:
        raise ArgumentError("partition must not be empty")
    column = haar_isometry(1, math.prod(partition), rng)[:, 0]
    return PureState(column, partition)


def random_product_state(partition: Sequence[int], rng: RandomStream) -> PureState:
    partition = tuple(partition)
    if not partition:
        raise ArgumentError("partition must not be empty")
    return product_state([haar_isometry(1, d, rng)[:, 0] for d in partition])


def save_state(psi: PureState, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(psi.to_json_dict(), f, indent=2)


def load_state(path: str) -> PureState:
    """Read a state file ({"partition": [...], "amplitudes": [[re, im], ...]})."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise InputError(f"state file {path} not found", path)
    except OSError as e:
        raise InputError(f"state file {path} cannot be read: {e}", path)
    except ValueError as e:
        # JSONDecodeError and UnicodeDecodeError are both ValueErrors
        raise InputError(f"state file {path} is not valid UTF-8 JSON: {e}", path)
    try:
        psi = PureState.from_json_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"state file {path} is malformed: {e}", path)
    logger.debug("loaded %s from %s", psi, path)
    return psi
