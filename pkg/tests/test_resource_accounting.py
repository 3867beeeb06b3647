#!/usr/bin/env python3
"""
Tests for the closed-form resource counts
"""

import math

import pytest

from src.concentration_lab import lemma2_n_value
from src.resource_accounting import (
    PROFILE_TABLE_COLUMNS,
    entangled_sharing_profile,
    holevo_optimality_check,
    profile_table,
    pure_preparation_profile,
)
from src.sdc_classes import ResourceProfile
from src.sdc_errors import ArgumentError


def test_pure_profile_at_l10_eps1():
    profile = pure_preparation_profile(10, 1.0)
    assert profile.qubits == pytest.approx(20.32, abs=0.01)
    assert profile.ebits == 10
    assert profile.rate == pytest.approx(20 / profile.qubits)
    assert abs(profile.qubits - profile.qubits_exact) <= 1.0
    assert profile.approximation_note


def test_rate_approaches_two():
    rate = pure_preparation_profile(10 ** 6, 0.5).rate
    assert 1.99 < rate < 2.0


def test_rate_increasing_in_l():
    rates = [pure_preparation_profile(l, 0.5).rate for l in (5, 10, 100, 1000, 10 ** 5)]
    assert all(b > a for a, b in zip(rates, rates[1:]))
    assert all(r < 2 for r in rates)


def test_ebits_equal_l():
    for l in (4, 10, 37):
        for eps in (0.7, 1.0):
            assert pure_preparation_profile(l, eps).ebits == l
            assert entangled_sharing_profile(l, eps).ebits == l


def test_sharing_profile_shared_bits():
    profile = entangled_sharing_profile(20, 0.5)
    assert profile.shared_random_bits == pytest.approx(86.64, abs=0.01)
    assert abs(profile.shared_random_bits - lemma2_n_value(2 ** 20, 0.5).log2_n) < 1.0


def test_profiles_differ_only_in_shared_bits():
    for l in (5, 10, 50):
        for eps in (0.5, 1.0):
            pure = pure_preparation_profile(l, eps)
            sharing = entangled_sharing_profile(l, eps)
            assert pure.qubits == sharing.qubits
            assert pure.ebits == sharing.ebits
            extra = 2 * l + math.log2(l) + 2 * math.log2(1 / eps) + 6
            assert sharing.shared_random_bits - pure.shared_random_bits == pytest.approx(extra)


def test_profile_fields_non_increasing_in_eps():
    for make in (pure_preparation_profile, entangled_sharing_profile):
        profiles = [make(12, eps) for eps in (0.25, 0.5, 0.75, 1.0)]
        for field in ("qubits", "ebits", "shared_random_bits", "qubits_exact", "exact_log2_ensemble_size"):
            values = [getattr(p, field) for p in profiles]
            assert all(b <= a for a, b in zip(values, values[1:]))


def test_hypothesis_violation():
    with pytest.raises(ArgumentError):
        pure_preparation_profile(3, 1.0)
    with pytest.raises(ArgumentError):
        entangled_sharing_profile(0, 1.0)
    with pytest.raises(ArgumentError):
        pure_preparation_profile(10, 0.0)


def test_holevo_check():
    assert holevo_optimality_check(pure_preparation_profile(10 ** 4, 0.5))
    l = 1000
    below = ResourceProfile(l=l, epsilon=0.5, qubits=l / 2, ebits=l, shared_random_bits=0, rate=4.0)
    assert not holevo_optimality_check(below)
    above = ResourceProfile(l=l, epsilon=0.5, qubits=2 * l, ebits=l, shared_random_bits=0, rate=1.0)
    assert not holevo_optimality_check(above)


def test_profile_validation():
    with pytest.raises(ArgumentError):
        ResourceProfile(l=10, epsilon=0.5, qubits=-1.0, ebits=10, shared_random_bits=0, rate=1.0)


def test_profile_table():
    rows = profile_table([10, 100], 1.0)
    assert [r["l"] for r in rows] == [10, 100]
    assert set(rows[0]) == set(PROFILE_TABLE_COLUMNS)
    assert rows[0]["qubits"] == pytest.approx(20.32, abs=0.01)
    assert rows[1]["near_optimal"]
