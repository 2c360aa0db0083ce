"""Shared fixtures: seeded generators and common single-qubit gates."""

from __future__ import annotations

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def s_gate():
    return np.diag([1.0, 1j])


@pytest.fixture
def h_gate():
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv("NOISYCLIFFORD_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("NOISYCLIFFORD_THREADS", raising=False)
