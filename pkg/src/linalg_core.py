#!/usr/bin/env python3
"""
Seedable dense complex linear algebra for the protocol simulations.

Conventions used everywhere in the package:

* subsystem 0 is the leftmost (most significant) tensor factor;
* flattening is row-major, so the double index (i, j) of a bipartite
  state with dims (d_A, d_B) maps to the flat index i * d_B + j;
* all numbers are complex128 / float64.
"""

import logging
import math
import string
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.sdc_errors import ArgumentError

logger = logging.getLogger(__name__)

# structural checks (unitarity, hermiticity, trace)
STRUCTURAL_TOL = 1e-10
# normalization of user supplied vectors
NORMALIZATION_TOL = 1e-8

ComplexMatrix = np.ndarray

SHARED_STREAM = 0
PRIVATE_STREAM = 1

SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class RandomStream:
    """Reproducible source of randomness.

    Two streams built from the same ``(seed, stream_id, trial)`` produce
    bit-identical draws. A stream is stateful: every draw advances it, so
    reproducing a run means building a fresh stream, not reusing one.
    Stream 0 models the parties' shared random bits, stream 1 Alice's
    private randomness.
    """
    seed: int
    stream_id: int = SHARED_STREAM
    trial: Optional[int] = None
    _generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        key = (self.stream_id,) if self.trial is None else (self.stream_id, self.trial)
        if any(k < 0 for k in key):
            raise ArgumentError(f"stream keys must be non-negative, got {key}")
        if not 0 <= int(self.seed) < SEED_LIMIT:
            raise ArgumentError(f"seed must be in [0, 2^64), got {self.seed}")
        sequence = np.random.SeedSequence(entropy=int(self.seed), spawn_key=key)
        object.__setattr__(self, "_generator", np.random.Generator(np.random.PCG64(sequence)))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def for_trial(self, trial: int) -> "RandomStream":
        """Independent substream for Monte Carlo trial ``trial``."""
        return RandomStream(self.seed, self.stream_id, int(trial))

    def standard_normal_complex(self, shape) -> np.ndarray:
        """Circular complex Gaussians with E|z|^2 = 1."""
        parts = self._generator.standard_normal(tuple(shape) + (2,))
        return (parts[..., 0] + 1j * parts[..., 1]) / math.sqrt(2.0)

    def uniform(self) -> float:
        return float(self._generator.random())

    def uniforms(self, size: int) -> np.ndarray:
        return self._generator.random(size)

    def integer(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self._generator.integers(0, n))


def as_complex_matrix(m, name: str = "matrix") -> ComplexMatrix:
    """Validate ``m`` as a finite 2-D array and return it as complex128."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ArgumentError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} contains NaN or Inf entries")
    return arr


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.complex128).reshape(-1)
    if arr.size == 0:
        raise ArgumentError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} contains NaN or Inf entries")
    return arr


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace Hermitian operator (positivity is checked on demand)."""
    entries: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.entries, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise ArgumentError(f"density matrix must be square, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > STRUCTURAL_TOL:
            raise ArgumentError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > STRUCTURAL_TOL:
            raise ArgumentError(f"density matrix trace is {np.trace(m).real:.12g}, expected 1")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_vector(cls, amplitudes) -> "DensityMatrix":
        v = _as_vector(amplitudes, "state vector")
        return cls(np.outer(v, v.conj()))

    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self.entries)

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    def max_eigenvalue(self) -> float:
        return float(self.eigenvalues()[-1])

    def is_positive(self, tol: float = STRUCTURAL_TOL) -> bool:
        return self.min_eigenvalue() >= -tol


def haar_unitary(dim: int, rng: RandomStream) -> ComplexMatrix:
    """Haar-distributed unitary on C^dim.

    QR of a complex Gaussian matrix; Q-R is not unique, so Q is rescaled by
    the phases of diag(R) to make the distribution exactly Haar.
    """
    if dim < 1:
        raise ArgumentError(f"dimension must be >= 1, got {dim}")
    return _gaussian_qr(dim, dim, rng)


def haar_isometry(in_dim: int, out_dim: int, rng: RandomStream) -> ComplexMatrix:
    """Haar isometry C^in_dim -> C^out_dim (out_dim x in_dim, V^dag V = I).

    Distributed as the first ``in_dim`` columns of a Haar unitary on
    C^out_dim; drawn with an economic QR of an out_dim x in_dim Gaussian.
    """
    if in_dim < 1 or out_dim < 1:
        raise ArgumentError(f"dimensions must be >= 1, got in={in_dim}, out={out_dim}")
    if out_dim < in_dim:
        raise ArgumentError(f"isometry needs out_dim >= in_dim, got in={in_dim}, out={out_dim}")
    return _gaussian_qr(out_dim, in_dim, rng)


def _gaussian_qr(rows: int, cols: int, rng: RandomStream) -> ComplexMatrix:
    z = rng.standard_normal_complex((rows, cols))
    q, r = scipy.linalg.qr(z, mode="economic")
    diag = np.diagonal(r)
    q *= diag / np.abs(diag)
    return q


def _check_subsystems(dims: Sequence[int], keep: Iterable[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ArgumentError(f"subsystem dims must be positive, got {dims}")
    kept = tuple(sorted(set(int(k) for k in keep)))
    if not kept or len(kept) >= len(dims):
        raise ArgumentError(f"keep must be a nonempty proper subset of {tuple(range(len(dims)))}, got {kept}")
    if kept[0] < 0 or kept[-1] >= len(dims):
        raise ArgumentError(f"keep indices {kept} out of range for {len(dims)} subsystems")
    return dims, kept


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the subsystems listed in ``keep``.

    Kept subsystems stay in increasing index order.
    """
    dims, kept = _check_subsystems(dims, keep)
    matrix = rho.entries if isinstance(rho, DensityMatrix) else as_complex_matrix(rho, "rho")
    total = math.prod(dims)
    if matrix.shape != (total, total):
        raise ArgumentError(f"rho has shape {matrix.shape}, dims {dims} need ({total}, {total})")

    n = len(dims)
    letters = string.ascii_letters
    row = [letters[i] for i in range(n)]
    col = [letters[n + i] if i in kept else letters[i] for i in range(n)]
    out = [letters[i] for i in kept] + [letters[n + i] for i in kept]
    subscripts = "".join(row) + "".join(col) + "->" + "".join(out)
    reduced = np.einsum(subscripts, matrix.reshape(dims + dims))

    kept_dim = math.prod(dims[i] for i in kept)
    return DensityMatrix(reduced.reshape(kept_dim, kept_dim))


def marginal_of_vector(amplitudes, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced state of the pure state ``amplitudes`` without forming |psi><psi|."""
    dims, kept = _check_subsystems(dims, keep)
    v = _as_vector(amplitudes, "state vector")
    if v.size != math.prod(dims):
        raise ArgumentError(f"vector length {v.size} does not match dims {dims}")
    traced = tuple(i for i in range(len(dims)) if i not in kept)
    kept_dim = math.prod(dims[i] for i in kept)
    m = np.transpose(v.reshape(dims), kept + traced).reshape(kept_dim, -1)
    return m @ m.conj().T


def operator_norm(m) -> float:
    """Largest singular value."""
    return float(scipy.linalg.svdvals(as_complex_matrix(m))[0])


def fidelity(psi, phi) -> float:
    """|<psi|phi>|^2 for unit vectors of equal length."""
    a = _as_vector(psi, "psi")
    b = _as_vector(phi, "phi")
    if a.size != b.size:
        raise ArgumentError(f"length mismatch: {a.size} vs {b.size}")
    for name, v in (("psi", a), ("phi", b)):
        if abs(np.linalg.norm(v) - 1.0) > NORMALIZATION_TOL:
            raise ArgumentError(f"{name} is not normalized (norm {np.linalg.norm(v):.12g})")
    value = abs(np.vdot(a, b)) ** 2
    return float(min(max(value, 0.0), 1.0))


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of rho - sigma."""
    a = rho.entries if isinstance(rho, DensityMatrix) else as_complex_matrix(rho, "rho")
    b = sigma.entries if isinstance(sigma, DensityMatrix) else as_complex_matrix(sigma, "sigma")
    if a.shape != b.shape:
        raise ArgumentError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    diff = (diff + diff.conj().T) / 2
    return float(0.5 * np.sum(np.abs(scipy.linalg.eigvalsh(diff))))


def random_observable(dim: int, rng: RandomStream) -> ComplexMatrix:
    """Random operator O with 0 <= O <= I (Haar eigenbasis, uniform spectrum)."""
    u = haar_unitary(dim, rng)
    spectrum = rng.uniforms(dim)
    return (u * spectrum) @ u.conj().T


def sqrt_psd(m, clamp: float = STRUCTURAL_TOL) -> ComplexMatrix:
    """Principal square root of a PSD matrix via eigendecomposition.

    Eigenvalues in [-clamp, 0) are set to zero; anything more negative is
    rejected.
    """
    h = as_complex_matrix(m)
    h = (h + h.conj().T) / 2
    values, vectors = scipy.linalg.eigh(h)
    if values[0] < -clamp:
        raise ArgumentError(f"matrix is not positive semidefinite (min eigenvalue {values[0]:.3e})")
    roots = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * roots) @ vectors.conj().T
