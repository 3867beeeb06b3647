#!/usr/bin/env python3
"""
Tests for the dense linear algebra layer
"""

import math

import numpy as np
import pytest

from src.linalg_core import (
    DensityMatrix,
    RandomStream,
    fidelity,
    haar_isometry,
    haar_unitary,
    marginal_of_vector,
    operator_norm,
    partial_trace,
    random_observable,
    sqrt_psd,
    trace_distance,
)
from src.quantum_states import max_entangled, random_state
from src.sdc_errors import ArgumentError


def test_stream_reproducible():
    a = RandomStream(7, 0).standard_normal_complex((3, 3))
    b = RandomStream(7, 0).standard_normal_complex((3, 3))
    assert np.array_equal(a, b)


def test_streams_and_trials_are_independent():
    base = RandomStream(7, 0)
    draws = [
        base.standard_normal_complex((4,)),
        RandomStream(7, 1).standard_normal_complex((4,)),
        base.for_trial(0).standard_normal_complex((4,)),
        base.for_trial(1).standard_normal_complex((4,)),
    ]
    for i in range(len(draws)):
        for j in range(i + 1, len(draws)):
            assert not np.allclose(draws[i], draws[j])


def test_for_trial_does_not_depend_on_parent_state():
    parent = RandomStream(11, 0)
    before = parent.for_trial(5).uniforms(3)
    parent.uniforms(100)
    after = parent.for_trial(5).uniforms(3)
    assert np.array_equal(before, after)


def test_negative_stream_key_rejected():
    with pytest.raises(ArgumentError):
        RandomStream(1, -1)


@pytest.mark.parametrize("seed", [-1, 2 ** 64, 2 ** 64 + 1])
def test_seed_outside_64_bits_rejected(seed):
    with pytest.raises(ArgumentError):
        RandomStream(seed)


def test_largest_seed_accepted():
    assert RandomStream(2 ** 64 - 1).uniforms(2).shape == (2,)


def test_haar_unitary_dim_one_is_a_phase(stream):
    u = haar_unitary(1, stream)
    assert u.shape == (1, 1)
    assert abs(abs(u[0, 0]) - 1.0) < 1e-12


@pytest.mark.parametrize("dim", range(1, 65))
def test_haar_unitary_is_unitary(dim, stream):
    u = haar_unitary(dim, stream)
    assert np.max(np.abs(u.conj().T @ u - np.eye(dim))) < 1e-10
    assert np.max(np.abs(u @ u.conj().T - np.eye(dim))) < 1e-10


def test_haar_unitary_rejects_zero_dim(stream):
    with pytest.raises(ArgumentError):
        haar_unitary(0, stream)


@pytest.mark.parametrize("dim", [2, 4])
def test_haar_first_moment(dim):
    rng = RandomStream(99, 0)
    draws = 100_000
    values = np.empty(draws)
    for i in range(draws):
        values[i] = abs(haar_unitary(dim, rng)[0, 0]) ** 2
    # |U_11|^2 ~ Beta(1, dim - 1)
    variance = (dim - 1) / (dim ** 2 * (dim + 1))
    sigma = math.sqrt(variance / draws)
    assert abs(values.mean() - 1.0 / dim) <= 3 * sigma


def test_haar_isometry_square_is_unitary(stream):
    v = haar_isometry(2, 2, stream)
    assert np.max(np.abs(v @ v.conj().T - np.eye(2))) < 1e-10


def test_haar_isometry_columns_orthonormal(stream):
    v = haar_isometry(2, 8, stream)
    assert v.shape == (8, 2)
    assert np.max(np.abs(v.conj().T @ v - np.eye(2))) < 1e-10


def test_haar_isometry_preserves_norm(stream):
    v = haar_isometry(3, 12, stream)
    x = np.array([1.0, 1j, -1.0]) / math.sqrt(3)
    assert abs(np.linalg.norm(v @ x) - 1.0) < 1e-10


def test_haar_isometry_rejects_shrinking(stream):
    with pytest.raises(ArgumentError):
        haar_isometry(4, 2, stream)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_partial_trace_of_max_entangled(d):
    rho = max_entangled(d).density_matrix()
    for keep in ([0], [1]):
        reduced = partial_trace(rho, (d, d), keep)
        assert np.allclose(reduced.entries, np.eye(d) / d, atol=1e-12)


def test_partial_trace_of_product_state():
    v = np.kron([1.0, 0.0], [0.0, 1.0])
    reduced = partial_trace(DensityMatrix.from_vector(v), (2, 2), keep=[1])
    assert np.allclose(reduced.entries, np.diag([0.0, 1.0]), atol=1e-12)
    reduced_a = partial_trace(DensityMatrix.from_vector(v), (2, 2), keep=[0])
    assert np.allclose(reduced_a.entries, np.diag([1.0, 0.0]), atol=1e-12)


def test_marginal_spectra_agree_with_schmidt(stream):
    psi = random_state((2, 2), stream)
    rho = psi.density_matrix()
    spec_a = partial_trace(rho, (2, 2), [0]).eigenvalues()
    spec_b = partial_trace(rho, (2, 2), [1]).eigenvalues()
    schmidt = np.sort(np.linalg.svd(psi.amplitudes.reshape(2, 2), compute_uv=False) ** 2)
    assert np.allclose(spec_a, spec_b, atol=1e-10)
    assert np.allclose(spec_a, schmidt, atol=1e-10)


def _mixed_state(dims, stream, rank=3):
    weights = stream.uniforms(rank)
    weights = weights / weights.sum()
    rho = sum(w * random_state(dims, stream).density_matrix().entries for w in weights)
    return DensityMatrix(rho)


def test_partial_trace_composes(stream):
    dims = (2, 3, 2)
    rho = _mixed_state(dims, stream)
    without_a = partial_trace(rho, dims, [1, 2])
    stepwise = partial_trace(without_a, dims[1:], [1])
    at_once = partial_trace(rho, dims, [2])
    assert np.max(np.abs(stepwise.entries - at_once.entries)) < 1e-12


@pytest.mark.parametrize("keep", [[0], [1], [2], [0, 2], [1, 2]])
def test_partial_trace_stays_positive(keep, stream):
    dims = (3, 2, 2)
    reduced = partial_trace(_mixed_state(dims, stream), dims, keep)
    assert np.min(np.linalg.eigvalsh(reduced.entries)) >= -1e-10
    assert abs(np.trace(reduced.entries) - 1.0) < 1e-10


def test_partial_trace_dimension_mismatch():
    with pytest.raises(ArgumentError):
        partial_trace(np.eye(4) / 4, (2, 3), [0])
    with pytest.raises(ArgumentError):
        partial_trace(np.eye(4) / 4, (2, 2), [0, 1])


def test_marginal_of_vector_matches_partial_trace(stream):
    psi = random_state((2, 3, 2), stream)
    for keep in ([0], [1], [2], [0, 2], [1, 2]):
        direct = partial_trace(psi.density_matrix(), psi.partition, keep).entries
        fast = marginal_of_vector(psi.amplitudes, psi.partition, keep)
        assert np.max(np.abs(direct - fast)) < 1e-12


def test_density_matrix_validation():
    with pytest.raises(ArgumentError):
        DensityMatrix(np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(ArgumentError):
        DensityMatrix(np.eye(2))
    with pytest.raises(ArgumentError):
        DensityMatrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    assert DensityMatrix(np.eye(3) / 3).is_positive()


def test_operator_norm():
    assert abs(operator_norm(np.eye(5)) - 1.0) < 1e-12
    assert abs(operator_norm(np.diag([3.0, 0.5])) - 3.0) < 1e-12


def test_operator_norm_matches_full_svd(stream):
    m = stream.standard_normal_complex((4, 4))
    assert abs(operator_norm(m) - np.linalg.svd(m, compute_uv=False)[0]) < 1e-10


@pytest.mark.parametrize("alpha", [0.0, -2.5, 3j, 1 - 1j])
def test_operator_norm_is_homogeneous(alpha, stream):
    m = stream.standard_normal_complex((5, 3))
    assert abs(operator_norm(alpha * m) - abs(alpha) * operator_norm(m)) < 1e-9


def test_fidelity_examples():
    v = np.array([0.6, 0.8j])
    assert abs(fidelity(v, v) - 1.0) < 1e-12
    assert fidelity([1, 0], [0, 1]) == 0.0
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    assert abs(fidelity(plus, [1, 0]) - 0.5) < 1e-12


def test_fidelity_errors():
    with pytest.raises(ArgumentError):
        fidelity([1, 0], [1, 0, 0])
    with pytest.raises(ArgumentError):
        fidelity([1, 1], [1, 0])


def test_trace_distance_of_orthogonal_states():
    assert abs(trace_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) - 1.0) < 1e-12
    assert trace_distance(np.eye(2) / 2, np.eye(2) / 2) < 1e-15


def test_random_observable_is_between_zero_and_identity(stream):
    o = random_observable(5, stream)
    assert np.max(np.abs(o - o.conj().T)) < 1e-12
    values = np.linalg.eigvalsh(o)
    assert values.min() >= -1e-12
    assert values.max() <= 1.0 + 1e-12


def test_sqrt_psd(stream):
    a = stream.standard_normal_complex((4, 4))
    psd = a @ a.conj().T
    root = sqrt_psd(psd)
    assert np.max(np.abs(root @ root - psd)) < 1e-9
    with pytest.raises(ArgumentError):
        sqrt_psd(np.diag([1.0, -0.5]))
