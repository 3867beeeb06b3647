#!/usr/bin/env python3
"""
Shared pytest fixtures
"""

import os
import sys
import inspect

import pytest

# Add the project root to the Python path
current_dir = os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe())))
project_root = os.path.dirname(current_dir)
sys.path.insert(0, project_root)

from src.linalg_core import RandomStream


@pytest.fixture
def stream():
    """Fresh shared stream with a fixed seed."""
    return RandomStream(20240917)


@pytest.fixture
def private_stream():
    return RandomStream(20240917, 1)


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    # a seed exported in the developer's shell must not leak into the tests
    monkeypatch.delenv("SDC_SEED", raising=False)
