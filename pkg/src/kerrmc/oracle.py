"""Exact reference dynamics of the Kerr oscillator for an initial coherent state.

In the interaction picture a number state only acquires the phase
exp(-i n(n-1) tau / 2), so a truncated Fock expansion gives machine-accurate
moments.  The closed-form X quadrature in the frame co-rotating at the mean
number nbar,

    <X(tau)> = sqrt(nbar) exp(nbar (cos tau - 1)) cos(nbar (sin tau - tau)),

is computed independently and serves as a cross-check on the Fock evolver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

_NORM_TOL = 1e-10


@dataclass(frozen=True)
class FockStateVector:
    """Truncated number-basis amplitudes c_0 .. c_cutoff."""

    amplitudes: np.ndarray
    cutoff: int


def default_cutoff(nbar: float) -> int:
    """Cutoff capturing a coherent state's norm to better than 1e-10.

    The additive margin keeps the Poisson tail below the tolerance for
    small nbar, where the 10-sigma term alone is not quite enough.
    """
    return math.ceil(nbar + 10.0 * math.sqrt(nbar) + 10.0)


def coherent_state(nbar: float, cutoff: int) -> FockStateVector:
    """Coherent state with real amplitude sqrt(nbar), truncated at cutoff."""
    if not nbar > 0:
        raise InvalidParameterError("nbar must be > 0")
    n = np.arange(cutoff + 1)
    # log amplitudes avoid overflow of nbar^n / n!
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, cutoff + 1)))])
    log_c = -0.5 * nbar + 0.5 * n * np.log(nbar) - 0.5 * log_fact
    amps = np.exp(log_c).astype(complex)
    deficit = abs(1.0 - float(np.sum(np.abs(amps) ** 2)))
    if deficit > _NORM_TOL:
        raise InvalidParameterError(
            "cutoff %d too small for nbar=%g (norm deficit %.3e)"
            % (cutoff, nbar, deficit)
        )
    return FockStateVector(amplitudes=amps, cutoff=cutoff)


def exact_X_rotating(nbar: float, tau: float) -> float:
    """Closed-form rotating-frame X quadrature."""
    if not nbar > 0:
        raise InvalidParameterError("nbar must be > 0")
    return (math.sqrt(nbar) * math.exp(nbar * (math.cos(tau) - 1.0))
            * math.cos(nbar * (math.sin(tau) - tau)))


def collapse_envelope(nbar: float, tau: float) -> float:
    """Gaussian collapse envelope sqrt(nbar) exp(-nbar tau^2).

    Large-nbar approximation, valid on the collapse timescale
    tau ~ 1/sqrt(nbar).
    """
    if not nbar > 0:
        raise InvalidParameterError("nbar must be > 0")
    return math.sqrt(nbar) * math.exp(-nbar * tau ** 2)


def fock_moments(nbar: float, tau: float, cutoff: int | None = None):
    """Exact (a_mean, n_mean, X_rotating) from the evolved Fock expansion."""
    if cutoff is None:
        cutoff = default_cutoff(nbar)
    state = coherent_state(nbar, cutoff)
    n = np.arange(cutoff + 1)
    amps = state.amplitudes * np.exp(-0.5j * n * (n - 1) * tau)
    a_mean = complex(np.sum(np.conj(amps[:-1]) * amps[1:] * np.sqrt(n[1:])))
    n_mean = float(np.sum(n * np.abs(amps) ** 2))
    x_rot = float(np.real(np.exp(1j * nbar * tau) * a_mean))
    return a_mean, n_mean, x_rot
