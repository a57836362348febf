"""Weighted moment estimation and multi-group error combination.

Physical averages are weight-normalised:

    <(a^dag)^m a^n> = < Omega O_mn > / < Omega + Omega^* >,
    O_mn = beta^m alpha^n + (beta^n alpha^m)^*.

Error bars always come from treating per-group (per-chain, per-population)
means as independent samples of the mean.  Hermitian observables should have
vanishing imaginary part; residues are logged as a representation diagnostic
rather than silently dropped.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import MomentKernelSpec, PhaseState, moment_kernel

log = logging.getLogger(__name__)

_RESIDUE_WARN = 1e-2


@dataclass(frozen=True)
class WeightedSample:
    state: PhaseState
    weight: float


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    stderr: float
    n_groups: int


@dataclass
class MomentSeries:
    """Time-indexed estimates for a set of named observables plus the weight."""

    times: np.ndarray
    moments: dict[str, list[MomentEstimate]]
    omega_mean: list[MomentEstimate]

    def means(self, name: str) -> np.ndarray:
        return np.array([e.mean for e in self.moments[name]])

    def stderrs(self, name: str) -> np.ndarray:
        return np.array([e.stderr for e in self.moments[name]])


def _log_residue(value: complex, context: str) -> float:
    re, im = float(np.real(value)), float(np.imag(value))
    if abs(im) > _RESIDUE_WARN * max(abs(re), 1e-300):
        log.warning("imaginary residue %.3e (re %.3e) in %s", im, re, context)
    elif im != 0.0:
        log.debug("imaginary residue %.3e in %s", im, context)
    return re


def weighted_kernel_mean(kernel_values: np.ndarray,
                         weights: np.ndarray) -> complex:
    """Sum_i w_i O_i / Sum_i 2 w_i on raw arrays (used by the samplers)."""
    total = np.sum(weights)
    if kernel_values.size == 0 or total <= 0:
        raise ValueError("need samples with positive total weight")
    return complex(np.sum(weights * kernel_values) / (2.0 * total))


def weighted_moment(samples: Sequence[WeightedSample],
                    spec: MomentKernelSpec) -> float:
    """Weight-normalised moment over an ensemble of (state, weight) samples."""
    if len(samples) == 0:
        raise ValueError("weighted_moment requires a nonempty sample set")
    kernels = np.array([moment_kernel(s.state, spec) for s in samples])
    weights = np.array([s.weight for s in samples], dtype=float)
    value = weighted_kernel_mean(kernels, weights)
    return _log_residue(value, "weighted_moment(m=%d, n=%d)" % (spec.m, spec.n))


def combine(group_means: Sequence[float]) -> MomentEstimate:
    """Mean and standard error across independent group means."""
    means = np.asarray(group_means, dtype=float)
    n = means.size
    if n < 2:
        raise ValueError("combine requires at least 2 group means")
    mean = float(np.mean(means))
    stderr = float(np.sqrt(np.sum((means - mean) ** 2) / n / (n - 1)))
    return MomentEstimate(mean=mean, stderr=stderr, n_groups=n)


def combine_series(group_means: np.ndarray) -> list[MomentEstimate]:
    """Apply :func:`combine` column-wise to a (groups, times) matrix."""
    matrix = np.asarray(group_means, dtype=float)
    return [combine(matrix[:, j]) for j in range(matrix.shape[1])]


def metropolis_estimate(sample_kernels: Sequence[float]) -> float:
    """Mean kernel over Metropolis samples divided by 2.

    The weight is absorbed into the sampling density, so no explicit
    weighting appears here.
    """
    values = np.asarray(sample_kernels)
    if values.size == 0:
        raise ValueError("metropolis_estimate requires samples")
    return _log_residue(complex(np.mean(values)) / 2.0, "metropolis_estimate")
