"""Shared fixtures: small, fast configurations used across the unit tests."""

import numpy as np
import pytest

from kerrmc import GaugeKind, GaugeParams, SimConfig


@pytest.fixture
def real_gauge():
    return GaugeParams(kind=GaugeKind.REAL, A=2.0, lam=0.5, nbar_frame=100.0)


@pytest.fixture
def complex_gauge():
    return GaugeParams(kind=GaugeKind.COMPLEX, A=2.0, nbar_frame=100.0)


@pytest.fixture
def small_sim(real_gauge):
    """100 steps at the paper's step size; fast enough for every unit test."""
    return SimConfig(nbar=100.0, total_time=0.01, dt=1e-4, gauge=real_gauge,
                     save_stride=10)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
