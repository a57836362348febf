"""Fixed-step Heun integration of the gauge SDEs.

A trajectory is a deterministic function of its noise path: the integrator
never draws random numbers itself.  Noise paths store unit normals and are
scaled by sqrt(dt) here, so the sampling density over paths is exactly the
standard multivariate normal.

Because theta carries no drift and constant noise coefficients, its path is
an exact Gaussian increment sum; phi and omega then depend on theta only.
This lets the whole trajectory be evaluated with cumulative sums along the
time axis, vectorised over an ensemble axis, while remaining step-for-step
identical to repeated application of :func:`step`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, InvalidParameterError
from .model import GaugeKind, GaugeParams, PhaseState

_GUARD = 700.0  # |Re theta| or |Re omega| beyond this flags divergence


@dataclass(frozen=True)
class SimConfig:
    """Parameters fixing one deterministic trajectory map."""

    nbar: float
    total_time: float
    dt: float
    gauge: GaugeParams
    save_stride: int = 10

    def __post_init__(self) -> None:
        if not self.nbar > 0:
            raise InvalidParameterError("nbar must be > 0")
        if not self.total_time > 0 or not self.dt > 0:
            raise InvalidParameterError("total_time and dt must be > 0")
        if self.dt > self.total_time:
            raise InvalidParameterError("dt must not exceed total_time")
        steps = self.total_time / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise InvalidParameterError(
                "total_time/dt must be an integer step count, got %r" % steps
            )
        if self.save_stride < 1:
            raise InvalidParameterError("save_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return round(self.total_time / self.dt)

    @property
    def n_channels(self) -> int:
        return self.gauge.n_channels

    def saved_indices(self) -> np.ndarray:
        idx = np.arange(0, self.n_steps + 1, self.save_stride)
        if idx[-1] != self.n_steps:
            idx = np.append(idx, self.n_steps)
        return idx


@dataclass
class Trajectory:
    """Recorded states of one trajectory plus its final weight."""

    times: np.ndarray
    thetas: np.ndarray
    phis: np.ndarray
    omegas: np.ndarray
    final_weight: float

    @property
    def states(self) -> list[PhaseState]:
        return [PhaseState(t, p, o)
                for t, p, o in zip(self.thetas, self.phis, self.omegas)]


# drift of phi as a function of theta alone, per gauge kind

def _phi_drift(theta: np.ndarray, gauge: GaugeParams) -> np.ndarray:
    base = 0.5 + gauge.nbar_frame
    if gauge.kind is GaugeKind.REAL:
        return (-np.exp(2.0 * theta.real) * np.cos(2.0 * theta.imag)
                + base).astype(complex)
    if gauge.kind is GaugeKind.COMPLEX:
        g2 = np.exp(gauge.A + 2.0 * theta.real) * np.sin(2.0 * theta.imag)
        return -np.exp(2.0 * theta) + base + 1j * np.exp(gauge.A) * g2
    return -np.exp(2.0 * theta) + base


def _g4(theta: np.ndarray, gauge: GaugeParams) -> np.ndarray:
    return -np.exp(2.0 * theta.real) * np.sin(2.0 * theta.imag) / gauge.lam


def _g2(theta: np.ndarray, gauge: GaugeParams) -> np.ndarray:
    return np.exp(gauge.A + 2.0 * theta.real) * np.sin(2.0 * theta.imag)


def _check_bounds(theta: np.ndarray, omega: np.ndarray) -> None:
    if (np.any(np.abs(theta.real) > _GUARD)
            or np.any(np.abs(np.real(omega)) > _GUARD)
            or not np.all(np.isfinite(theta))
            or not np.all(np.isfinite(omega))):
        raise DivergenceError(
            "trajectory diverged (|Re theta| or |Re omega| out of range); "
            "this indicates a configuration bug, not a sampling event"
        )


def step(state: PhaseState, increments, dt: float,
         gauge: GaugeParams) -> PhaseState:
    """One Heun predictor-corrector step driven by unit-normal increments.

    The theta and phi noise coefficients are constant so their noise terms
    are exact; the phi drift and the weight gauge are averaged between the
    current and predicted state.
    """
    w = np.asarray(increments, dtype=float)
    if w.shape != (gauge.n_channels,):
        raise InvalidParameterError(
            "expected %d increments, got shape %r" % (gauge.n_channels, w.shape)
        )
    sq = np.sqrt(dt)
    th0 = np.asarray(state.theta, dtype=complex)
    th1 = th0 + 0.5 * np.exp(-gauge.A) * (w[0] - 1j * w[1]) * sq
    h0, h1 = _phi_drift(th0, gauge), _phi_drift(th1, gauge)

    if gauge.kind is GaugeKind.REAL:
        noise_phi = (-0.5 * np.exp(gauge.A) * (w[0] + 1j * w[1])
                     + gauge.lam * (w[2] + 1j * w[3])) * sq
        g0, g1 = _g4(th0, gauge), _g4(th1, gauge)
        domega = (-0.25 * (g0 ** 2 + g1 ** 2) * dt
                  + 0.5 * (g0 + g1) * sq * w[3])
    elif gauge.kind is GaugeKind.COMPLEX:
        noise_phi = -0.5 * np.exp(gauge.A) * (w[0] + 1j * w[1]) * sq
        g2_0, g2_1 = _g2(th0, gauge), _g2(th1, gauge)
        g1_0, g1_1 = 1j * g2_0, 1j * g2_1
        domega = (-0.25 * ((g1_0 ** 2 + g2_0 ** 2)
                           + (g1_1 ** 2 + g2_1 ** 2)) * dt
                  + 0.5 * (g1_0 + g1_1) * sq * w[0]
                  + 0.5 * (g2_0 + g2_1) * sq * w[1])
    else:
        noise_phi = -0.5 * np.exp(gauge.A) * (w[0] + 1j * w[1]) * sq
        domega = 0.0 + 0.0j

    phi = state.phi + 0.5 * (h0 + h1) * dt + noise_phi
    omega = state.omega_log + domega
    _check_bounds(np.asarray(th1), np.asarray(omega))
    return PhaseState(theta=complex(th1), phi=complex(phi),
                      omega_log=complex(omega))


def _theta_path(values: np.ndarray, cfg: SimConfig) -> np.ndarray:
    """Exact theta path, shape (n, N+1), from unit-normal noise (n, R, N)."""
    gauge = cfg.gauge
    sq = np.sqrt(cfg.dt)
    dth = 0.5 * np.exp(-gauge.A) * (values[:, 0, :] - 1j * values[:, 1, :]) * sq
    n = values.shape[0]
    th = np.empty((n, dth.shape[1] + 1), dtype=complex)
    th[:, 0] = 0.5 * np.log(cfg.nbar)
    th[:, 1:] = th[:, [0]] + np.cumsum(dth, axis=1)
    return th


def _omega_increments(th: np.ndarray, values: np.ndarray,
                      cfg: SimConfig) -> np.ndarray:
    """Per-step Heun increments of omega, shape (n, N)."""
    gauge = cfg.gauge
    dt, sq = cfg.dt, np.sqrt(cfg.dt)
    if gauge.kind is GaugeKind.REAL:
        g = _g4(th, gauge)
        return (-0.25 * (g[:, :-1] ** 2 + g[:, 1:] ** 2) * dt
                + 0.5 * (g[:, :-1] + g[:, 1:]) * sq * values[:, 3, :])
    if gauge.kind is GaugeKind.COMPLEX:
        g2 = _g2(th, gauge)
        g1 = 1j * g2
        return (-0.25 * ((g1[:, :-1] ** 2 + g2[:, :-1] ** 2)
                         + (g1[:, 1:] ** 2 + g2[:, 1:] ** 2)) * dt
                + 0.5 * (g1[:, :-1] + g1[:, 1:]) * sq * values[:, 0, :]
                + 0.5 * (g2[:, :-1] + g2[:, 1:]) * sq * values[:, 1, :])
    return np.zeros((th.shape[0], th.shape[1] - 1), dtype=complex)


def _phi_increments(th: np.ndarray, values: np.ndarray,
                    cfg: SimConfig) -> np.ndarray:
    gauge = cfg.gauge
    dt, sq = cfg.dt, np.sqrt(cfg.dt)
    h = _phi_drift(th, gauge)
    noise = -0.5 * np.exp(gauge.A) * (values[:, 0, :] + 1j * values[:, 1, :]) * sq
    if gauge.kind is GaugeKind.REAL:
        noise = noise + gauge.lam * (values[:, 2, :] + 1j * values[:, 3, :]) * sq
    return 0.5 * (h[:, :-1] + h[:, 1:]) * dt + noise


def _validate_noise(values: np.ndarray, cfg: SimConfig) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim == 2:
        values = values[None, :, :]
    n, r, steps = values.shape
    if r != cfg.n_channels or steps != cfg.n_steps:
        raise InvalidParameterError(
            "noise shape (%d, %d) does not match (R=%d, N=%d)"
            % (r, steps, cfg.n_channels, cfg.n_steps)
        )
    return values


def evolve_paths(values: np.ndarray, cfg: SimConfig):
    """Evolve an ensemble of noise paths; returns saved-state arrays.

    Parameters
    ----------
    values : (n, R, N) or (R, N) array of unit normals.

    Returns
    -------
    times : (S,) array of saved times.
    theta, phi, omega : (n, S) complex arrays at the saved times.
    """
    values = _validate_noise(values, cfg)
    th = _theta_path(values, cfg)
    omega = np.cumsum(_omega_increments(th, values, cfg), axis=1)
    phi = np.cumsum(_phi_increments(th, values, cfg), axis=1)
    _check_bounds(th, omega)
    idx = cfg.saved_indices()
    n = values.shape[0]
    zero = np.zeros((n, 1), dtype=complex)
    omega_full = np.concatenate([zero, omega], axis=1)
    phi_full = np.concatenate([zero, phi], axis=1)
    return idx * cfg.dt, th[:, idx], phi_full[:, idx], omega_full[:, idx]


def final_phase_points(values: np.ndarray, cfg: SimConfig):
    """Memory-lean evaluation of (theta, phi, omega) at the target time only."""
    values = _validate_noise(values, cfg)
    th = _theta_path(values, cfg)
    omega = np.cumsum(_omega_increments(th, values, cfg), axis=1)[:, -1]
    phi = np.cumsum(_phi_increments(th, values, cfg), axis=1)[:, -1]
    _check_bounds(th, omega)
    return th[:, -1], phi, omega


def final_omegas(values: np.ndarray, cfg: SimConfig) -> np.ndarray:
    """log-weights at the target time for an ensemble, skipping phi entirely."""
    values = _validate_noise(values, cfg)
    th = _theta_path(values, cfg)
    omega = np.cumsum(_omega_increments(th, values, cfg), axis=1)[:, -1]
    _check_bounds(th, omega)
    return omega


def evolve(path, cfg: SimConfig) -> Trajectory:
    """Deterministically map one noise path to a recorded trajectory."""
    from .noise import NoisePath  # local import to avoid a cycle

    values = path.values if isinstance(path, NoisePath) else path
    times, th, phi, omega = evolve_paths(values, cfg)
    return Trajectory(times=times, thetas=th[0], phis=phi[0], omegas=omega[0],
                      final_weight=float(np.exp(np.real(omega[0, -1]))))


def final_weight(path, cfg: SimConfig) -> float:
    """Weight at the target time without retaining intermediate states."""
    from .noise import NoisePath

    values = path.values if isinstance(path, NoisePath) else path
    return float(np.exp(np.real(final_omegas(values, cfg)[0])))
