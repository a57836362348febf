"""Gaussian noise paths and their frequency-domain manipulation.

A noise path is the R x N matrix of unit normals that fully determines one
trajectory; it is the state of the Metropolis sampler.  Proposals act on the
discrete Fourier transform of each channel,

    K(n) = sum_k exp(+2 pi i k n / N) w(k),

which for real w obeys K(N-n) = K(n)^* so only the bins n = 0 .. floor(N/2)
are independent (the DC bin, and for even N the Nyquist bin, are real).
Regenerating a bin from its prior distribution makes the proposal density
cancel the Gaussian factors in the Metropolis acceptance, leaving the bare
weight ratio.

Mutation keeps the spectrum of the result cached so that unselected bins are
preserved bit-exactly rather than through a transform roundtrip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, InvalidSpectrumError
from .integrator import SimConfig, final_omegas

_SYMMETRY_TOL = 1e-9


@dataclass
class SpectrumPath:
    """DFT of each noise channel; shape (R, N) complex with Hermitian symmetry."""

    bins: np.ndarray

    def __post_init__(self) -> None:
        self.bins = np.asarray(self.bins, dtype=complex)
        if self.bins.ndim != 2:
            raise InvalidParameterError("spectrum must be a 2-d array")

    @property
    def n_channels(self) -> int:
        return self.bins.shape[0]

    @property
    def n_bins(self) -> int:
        return self.bins.shape[1]


@dataclass
class NoisePath:
    """R x N matrix of unit-normal draws (R channels, N time steps)."""

    values: np.ndarray
    _spectrum: SpectrumPath | None = field(default=None, repr=False,
                                           compare=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise InvalidParameterError("noise path must be a 2-d array")
        if not np.all(np.isfinite(self.values)):
            raise InvalidParameterError("noise path must contain finite entries")

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]

    @property
    def n_steps(self) -> int:
        return self.values.shape[1]


def sample(n_channels: int, n_steps: int, rng: np.random.Generator) -> NoisePath:
    """Fresh i.i.d. standard-normal noise path."""
    if n_channels < 1 or n_steps < 1:
        raise InvalidParameterError("n_channels and n_steps must be >= 1")
    return NoisePath(rng.standard_normal((n_channels, n_steps)))


def n_independent_bins(n_steps: int) -> int:
    """Independent spectral bins per channel (DC .. Nyquist inclusive)."""
    return n_steps // 2 + 1 if n_steps % 2 == 0 else (n_steps + 1) // 2


def real_bin_indices(n_steps: int) -> tuple[int, ...]:
    """Bins constrained to be real: DC, plus Nyquist for even length."""
    return (0, n_steps // 2) if n_steps % 2 == 0 and n_steps > 1 else (0,)


def to_spectrum(path: NoisePath) -> SpectrumPath:
    """Forward transform K(n) = sum_k exp(+2 pi i k n/N) w(k) of each channel."""
    if path._spectrum is not None:
        return path._spectrum
    n = path.n_steps
    spec = SpectrumPath(np.fft.ifft(path.values, axis=1) * n)
    path._spectrum = spec
    return spec


def _symmetry_defect(bins: np.ndarray) -> float:
    n = bins.shape[1]
    mirrored = bins[:, (-np.arange(n)) % n]
    return float(np.max(np.abs(bins - np.conj(mirrored))))


def from_spectrum(spec: SpectrumPath) -> NoisePath:
    """Inverse transform; rejects spectra violating Hermitian symmetry."""
    defect = _symmetry_defect(spec.bins)
    if defect > _SYMMETRY_TOL:
        raise InvalidSpectrumError(
            "spectrum violates Hermitian symmetry (defect %.3e)" % defect
        )
    n = spec.n_bins
    values = np.real(np.fft.fft(spec.bins, axis=1)) / n
    path = NoisePath(values)
    path._spectrum = spec
    return path


def _regenerate_bin(bins: np.ndarray, channel: int, bin_index: int,
                    rng: np.random.Generator) -> None:
    """Redraw one independent bin from its prior, fixing the conjugate partner."""
    n = bins.shape[1]
    if bin_index in real_bin_indices(n):
        bins[channel, bin_index] = rng.normal(0.0, math.sqrt(n))
    else:
        scale = math.sqrt(n / 2.0)
        value = rng.normal(0.0, scale) + 1j * rng.normal(0.0, scale)
        bins[channel, bin_index] = value
        bins[channel, (n - bin_index) % n] = np.conj(value)


def mutate(path: NoisePath, fraction: float,
           rng: np.random.Generator) -> NoisePath:
    """Prior-regeneration proposal: redraw a random subset of bins per channel.

    For each channel, ceil(fraction * B) of the B independent bins are chosen
    uniformly without replacement and redrawn from the prior; conjugate
    partners follow.  Unselected bins are untouched.
    """
    if not 0.0 < fraction <= 1.0:
        raise InvalidParameterError("fraction must lie in (0, 1]")
    n = path.n_steps
    n_bins = n_independent_bins(n)
    n_select = math.ceil(fraction * n_bins)
    bins = to_spectrum(path).bins.copy()
    for channel in range(path.n_channels):
        selected = rng.choice(n_bins, size=n_select, replace=False)
        for b in selected:
            _regenerate_bin(bins, channel, int(b), rng)
    return from_spectrum(SpectrumPath(bins))


def sensitivity_scan(base: NoisePath, cfg: SimConfig, bin_index: int,
                     trials: int, rng: np.random.Generator,
                     channel: int = 3) -> float:
    """Spread of the final weight under redraws of a single spectral bin.

    The chosen bin of the chosen channel is regenerated ``trials`` times, the
    full trajectory re-evolved each time, and the standard deviation of the
    final weights returned.
    """
    if trials < 2:
        raise InvalidParameterError("trials must be >= 2")
    n = base.n_steps
    if not 0 <= bin_index < n_independent_bins(n):
        raise InvalidParameterError("bin index out of range")
    base_bins = to_spectrum(base).bins
    weights = np.empty(trials)
    bins = base_bins.copy()
    for t in range(trials):
        _regenerate_bin(bins, channel, bin_index, rng)
        trial = from_spectrum(SpectrumPath(bins))
        weights[t] = np.exp(np.real(final_omegas(trial.values, cfg)[0]))
    return float(np.std(weights))
