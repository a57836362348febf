"""Phase-space model of the Kerr anharmonic oscillator in log variables.

The single-mode system is described by a pair of off-diagonal coherent-state
amplitudes (alpha, beta) and a multiplicative trajectory weight Omega.  For
numerical stability everything is expressed in log variables

    theta = (1/2) log(alpha * beta)
    phi   = (1/(2i)) log(alpha / beta)
    omega = log(Omega)

The functions here are pure: drift, gauge and kernel evaluations accept either
scalars or numpy arrays and never touch shared state, so they can be evaluated
from any number of workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidParameterError, UnsupportedConfigurationError


class GaugeKind(Enum):
    """Drift-gauge family selecting how the weight is driven."""

    REAL = "real"
    COMPLEX = "complex"
    NONE = "none"


@dataclass(frozen=True)
class GaugeParams:
    """Constant gauge parameters for a run.

    Attributes
    ----------
    kind : GaugeKind
        REAL uses the non-square-noise real gauge (four noise channels,
        weight stays real).  COMPLEX uses the complex drift gauge (two
        channels, weight goes complex; demonstration only).  NONE disables
        drift gauges entirely (weight frozen at 1).
    A : float
        Constant diffusion gauge reshaping the noise split between the
        theta and phi channels.
    lam : float
        Amplitude of the extra noise channels introduced by the non-square
        noise matrix; must be positive for the REAL gauge.
    nbar_frame : float
        Angular frequency of the co-rotating frame, normally set to the
        mean particle number.
    """

    kind: GaugeKind
    A: float = 2.0
    lam: float = 0.5
    nbar_frame: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is GaugeKind.REAL and not self.lam > 0:
            raise InvalidParameterError(
                "REAL gauge requires lam > 0, got %r" % (self.lam,)
            )
        if self.nbar_frame < 0:
            raise InvalidParameterError(
                "nbar_frame must be >= 0, got %r" % (self.nbar_frame,)
            )

    @property
    def n_channels(self) -> int:
        """Number of real noise channels required per time step."""
        return 4 if self.kind is GaugeKind.REAL else 2


@dataclass(frozen=True)
class PhaseState:
    """One phase-space point in log variables.

    Under the REAL gauge omega_log stays real for all times; the complex
    type is kept so the same container serves the COMPLEX gauge.
    """

    theta: complex
    phi: complex
    omega_log: complex = 0.0 + 0.0j

    @property
    def alpha(self) -> complex:
        return np.exp(self.theta + 1j * self.phi)

    @property
    def beta(self) -> complex:
        return np.exp(self.theta - 1j * self.phi)

    @property
    def weight(self) -> complex:
        return np.exp(self.omega_log)

    @classmethod
    def from_alpha_beta(cls, alpha: complex, beta: complex,
                        omega_log: complex = 0.0) -> "PhaseState":
        """Recover log variables from mode variables (principal branch)."""
        la, lb = np.log(alpha), np.log(beta)
        return cls(theta=0.5 * (la + lb), phi=(la - lb) / 2j,
                   omega_log=omega_log)


@dataclass(frozen=True)
class MomentKernelSpec:
    """Powers (m, n) in the normally ordered product <(a^dag)^m a^n>."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 0 or self.n < 0:
            raise InvalidParameterError("kernel powers must be non-negative")


def initial_state(nbar: float) -> PhaseState:
    """Delta-function initial condition for a coherent state of mean number nbar.

    alpha = beta = sqrt(nbar), so theta = log(nbar)/2 (real), phi = 0, and the
    weight starts at 1.
    """
    if not nbar > 0:
        raise InvalidParameterError("nbar must be > 0, got %r" % (nbar,))
    return PhaseState(theta=0.5 * np.log(nbar) + 0.0j, phi=0.0 + 0.0j,
                      omega_log=0.0 + 0.0j)


def _require_real(gauge: GaugeParams, what: str) -> None:
    if gauge.kind is not GaugeKind.REAL:
        raise UnsupportedConfigurationError(
            "%s is defined for the REAL gauge only (got %s)" % (what, gauge.kind)
        )


def drift(state: PhaseState, gauge: GaugeParams):
    """Deterministic (Stratonovich) drift of (theta, phi, omega) for the REAL gauge.

    theta has no drift; phi relaxes under the nonlinearity plus the
    rotating-frame shift; omega carries the Stratonovich correction
    S_omega = -exp(4 theta_X) sin^2(2 theta_Y) / (2 lam^2), which equals
    -g4^2/2 for this gauge.
    """
    _require_real(gauge, "drift")
    th_x = np.real(state.theta)
    th_y = np.imag(state.theta)
    e2 = np.exp(2.0 * th_x)
    s2 = np.sin(2.0 * th_y)
    dphi = -e2 * np.cos(2.0 * th_y) + 0.5 + gauge.nbar_frame
    domega = -(e2 * s2) ** 2 / (2.0 * gauge.lam ** 2)
    return 0.0 + 0.0j, dphi + 0.0j, domega + 0.0j


def gauge_g4(state: PhaseState, gauge: GaugeParams) -> float:
    """Weight-driving gauge g4 = -exp(2 theta_X) sin(2 theta_Y) / lam.

    The remaining gauges g1 = g2 = g3 = 0 for the REAL gauge.
    """
    _require_real(gauge, "gauge_g4")
    if gauge.lam == 0:
        raise InvalidParameterError("lam must be nonzero")
    return -np.exp(2.0 * np.real(state.theta)) * np.sin(
        2.0 * np.imag(state.theta)) / gauge.lam


def noise_coefficients(state: PhaseState, gauge: GaugeParams) -> np.ndarray:
    """Coefficients mapping the four unit noises to (dtheta, dphi, domega).

    Returns a (3, 4) complex array: row 0 is the theta row, row 1 phi,
    row 2 omega.  The theta and phi rows are state-independent constants;
    only the omega row (g4 on channel 4) depends on the state.
    """
    _require_real(gauge, "noise_coefficients")
    c = 0.5 * np.exp(-gauge.A)
    d = 0.5 * np.exp(gauge.A)
    lam = gauge.lam
    g4 = gauge_g4(state, gauge)
    return np.array([
        [c, -1j * c, 0.0, 0.0],
        [-d, -1j * d, lam, 1j * lam],
        [0.0, 0.0, 0.0, g4],
    ], dtype=complex)


def complex_gauge_drift(state: PhaseState, gauge: GaugeParams):
    """Complex drift-gauge pair (g1, g2) with g1 = i g2 = i e^{A + 2 theta_X} sin(2 theta_Y).

    Used only to demonstrate weight-phase spreading; the Monte Carlo
    samplers reject this gauge.
    """
    if gauge.kind is not GaugeKind.COMPLEX:
        raise UnsupportedConfigurationError(
            "complex_gauge_drift requires gauge kind COMPLEX"
        )
    g2 = np.exp(gauge.A + 2.0 * np.real(state.theta)) * np.sin(
        2.0 * np.imag(state.theta))
    return 1j * g2, g2 + 0.0j


def moment_kernel(state: PhaseState, spec: MomentKernelSpec) -> complex:
    """Single-sample kernel O_mn = beta^m alpha^n + (beta^n alpha^m)^*."""
    a, b = state.alpha, state.beta
    return b ** spec.m * a ** spec.n + np.conj(b ** spec.n * a ** spec.m)


def number_kernel(state: PhaseState) -> complex:
    """Particle-number variable alpha * beta = exp(2 theta)."""
    return np.exp(2.0 * state.theta)


def quadx_kernel(state: PhaseState) -> complex:
    """X-quadrature variable (alpha + beta)/2 = exp(theta) cos(phi)."""
    return np.exp(state.theta) * np.cos(state.phi)
