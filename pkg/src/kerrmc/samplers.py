"""The three sampling engines: plain stochastic, Metropolis-Hastings, branching.

All three are driven by a master seed; every independent unit of work (group,
chain, population) draws from its own generator derived from (seed, unit
index), so results are bit-identical at any worker count and combination
order is fixed.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import noise as noise_mod
from .errors import (InvalidParameterError, PopulationExtinctionError,
                     UnsupportedConfigurationError)
from .estimators import MomentEstimate, MomentSeries, combine_series
from .integrator import (SimConfig, _g4, _phi_drift, evolve_paths,
                         final_phase_points)
from .model import GaugeKind, MomentKernelSpec

log = logging.getLogger(__name__)

# observables as linear combinations of kernels; X is symmetrised so its
# estimator is Hermitian (zero imaginary residue under a real weight)
DEFAULT_KERNELS: list[tuple[str, list[tuple[float, MomentKernelSpec]]]] = [
    ("X", [(0.5, MomentKernelSpec(0, 1)), (0.5, MomentKernelSpec(1, 0))]),
    ("n", [(1.0, MomentKernelSpec(1, 1))]),
]


@dataclass(frozen=True)
class StochasticRunConfig:
    sim: SimConfig
    n_trajectories: int
    n_groups: int
    seed: int

    def __post_init__(self) -> None:
        if self.n_groups < 2:
            raise InvalidParameterError("n_groups must be >= 2")
        if self.n_trajectories % self.n_groups != 0:
            raise InvalidParameterError(
                "n_trajectories must be divisible by n_groups"
            )


@dataclass(frozen=True)
class MetropolisRunConfig:
    sim: SimConfig
    target_time: float
    n_chains: int
    samples_per_chain: int
    burn_in: int
    mutate_fraction: float
    seed: int

    def __post_init__(self) -> None:
        if abs(self.target_time - self.sim.total_time) > 1e-12:
            raise InvalidParameterError(
                "target_time must equal sim.total_time"
            )
        if self.n_chains < 2:
            raise InvalidParameterError("n_chains must be >= 2")
        if self.samples_per_chain < 1:
            raise InvalidParameterError("samples_per_chain must be >= 1")
        if self.burn_in < 0:
            raise InvalidParameterError("burn_in must be >= 0")
        if not 0.0 < self.mutate_fraction <= 1.0:
            raise InvalidParameterError("mutate_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class BranchingRunConfig:
    sim: SimConfig
    n_pop: int
    n_populations: int
    branch_interval: float
    seed: int

    def __post_init__(self) -> None:
        if self.n_populations < 2:
            raise InvalidParameterError("n_populations must be >= 2")
        if self.n_pop < 1:
            raise InvalidParameterError("n_pop must be >= 1")
        ratio = self.branch_interval / self.sim.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
            raise InvalidParameterError(
                "branch_interval must be an integer multiple of dt"
            )
        events = self.sim.total_time / self.branch_interval
        if abs(events - round(events)) > 1e-9 * max(1.0, events):
            raise InvalidParameterError(
                "total_time must be an integer multiple of branch_interval"
            )

    @property
    def steps_per_branch(self) -> int:
        return round(self.branch_interval / self.sim.dt)


@dataclass
class ChainRecord:
    accepted: int
    proposed: int
    kernel_means: dict[str, float]

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0


@dataclass
class MetropolisResult:
    target_time: float
    estimates: dict[str, MomentEstimate]
    chains: list[ChainRecord]

    @property
    def acceptance_rate(self) -> float:
        acc = sum(c.accepted for c in self.chains)
        prop = sum(c.proposed for c in self.chains)
        return acc / prop if prop else 0.0


@dataclass
class BranchingResult:
    series: MomentSeries
    population_sizes: np.ndarray  # (n_populations, n_events), post-branch sizes


def _unit_rng(seed: int, unit: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(unit,)))
    )


def _kernel_numerators(theta: np.ndarray, phi: np.ndarray,
                       weights: np.ndarray, combo):
    """Sum over samples of a linear combination of weighted kernels.

    Each term contributes Omega beta^m alpha^n + (Omega beta^n alpha^m)^*.
    """
    alpha = np.exp(theta + 1j * phi)
    beta = np.exp(theta - 1j * phi)
    total = 0.0
    for coeff, spec in combo:
        total = total + coeff * np.sum(
            weights * beta ** spec.m * alpha ** spec.n
            + np.conj(weights * beta ** spec.n * alpha ** spec.m), axis=0)
    return total


def _kernel_values(theta, phi, combo):
    alpha = np.exp(theta + 1j * phi)
    beta = np.exp(theta - 1j * phi)
    total = 0.0
    for coeff, spec in combo:
        total = total + coeff * (beta ** spec.m * alpha ** spec.n + np.conj(
            beta ** spec.n * alpha ** spec.m))
    return total


def _map_units(fn, args_list, workers: int):
    if workers <= 1 or len(args_list) <= 1:
        return [fn(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args_list))


# ---------------------------------------------------------------------------
# plain stochastic ensemble

_CHUNK = 2000


def _stochastic_group(args):
    cfg, kernels, group = args
    sim = cfg.sim
    rng = _unit_rng(cfg.seed, group)
    per_group = cfg.n_trajectories // cfg.n_groups
    n_saved = len(sim.saved_indices())
    num = {name: np.zeros(n_saved, dtype=complex) for name, _ in kernels}
    weight_sum = np.zeros(n_saved, dtype=complex)
    count = 0
    remaining = per_group
    while remaining > 0:
        chunk = min(_CHUNK, remaining)
        remaining -= chunk
        values = rng.standard_normal((chunk, sim.n_channels, sim.n_steps))
        times, th, phi, om = evolve_paths(values, sim)
        weights = np.exp(om)
        weight_sum += np.sum(weights, axis=0)
        for name, spec in kernels:
            num[name] += _kernel_numerators(th, phi, weights, spec)
        count += chunk
    denom = 2.0 * np.real(weight_sum)
    means = {name: np.real(num[name]) / denom for name, _ in kernels}
    for name, _ in kernels:
        resid = np.max(np.abs(np.imag(num[name])) /
                       np.maximum(np.abs(np.real(num[name])), 1e-300))
        if resid > 1e-2:
            log.warning("group %d kernel %s: imaginary residue ratio %.3e",
                        group, name, resid)
    omega_mean = np.real(weight_sum) / count
    return times, means, omega_mean


def run_stochastic(cfg: StochasticRunConfig, kernels=None,
                   workers: int = 1) -> MomentSeries:
    """Average fresh random trajectories in independent groups."""
    kernels = list(DEFAULT_KERNELS if kernels is None else kernels)
    args = [(cfg, kernels, g) for g in range(cfg.n_groups)]
    results = _map_units(_stochastic_group, args, workers)
    times = results[0][0]
    moments: dict[str, list[MomentEstimate]] = {}
    for name, _ in kernels:
        matrix = np.vstack([r[1][name] for r in results])
        moments[name] = combine_series(matrix)
    omega_matrix = np.vstack([r[2] for r in results])
    return MomentSeries(times=times, moments=moments,
                        omega_mean=combine_series(omega_matrix))


# ---------------------------------------------------------------------------
# Metropolis-Hastings over noise paths

def metropolis_chain(path: noise_mod.NoisePath, evaluate, mutate_fraction: float,
                     burn_in: int, n_samples: int,
                     rng: np.random.Generator):
    """Generic single chain over noise-path space.

    ``evaluate(path) -> (weight, payload)`` supplies the target weight and
    whatever per-state payload the caller wants recorded.  Proposals are
    prior-regeneration mutations, so the acceptance is the bare weight ratio
    min(1, w'/w).  Rejected proposals repeat the current payload.

    Returns (payloads, accepted, proposed) where the counters cover the
    sampling phase only.
    """
    weight, payload = evaluate(path)
    payloads = []
    accepted = proposed = 0
    burn_accepted = 0
    total = burn_in + n_samples
    for i in range(total):
        candidate = noise_mod.mutate(path, mutate_fraction, rng)
        cand_weight, cand_payload = evaluate(candidate)
        u = rng.uniform()
        accept = u * weight <= cand_weight
        sampling = i >= burn_in
        if accept:
            path, weight, payload = candidate, cand_weight, cand_payload
            if sampling:
                accepted += 1
            else:
                burn_accepted += 1
        if sampling:
            proposed += 1
            payloads.append(payload)
    if burn_in > 0 and burn_accepted == 0:
        log.warning("no proposals accepted during burn-in (%d proposals); "
                    "chain may not have converged", burn_in)
    return payloads, accepted, proposed


def _metropolis_evaluate(sim: SimConfig, kernels):
    def evaluate(path):
        th, phi, om = final_phase_points(path.values, sim)
        weight = float(np.exp(np.real(om[0])))
        payload = tuple(complex(_kernel_values(th[0], phi[0], spec))
                        for _, spec in kernels)
        return weight, payload

    return evaluate


def _metropolis_chain_unit(args):
    cfg, kernels, chain = args
    sim = cfg.sim
    rng = _unit_rng(cfg.seed, chain)
    start = noise_mod.sample(sim.n_channels, sim.n_steps, rng)
    payloads, accepted, proposed = metropolis_chain(
        start, _metropolis_evaluate(sim, kernels), cfg.mutate_fraction,
        cfg.burn_in, cfg.samples_per_chain, rng)
    sums = np.mean(np.array(payloads), axis=0) / 2.0
    means = {}
    for (name, _), value in zip(kernels, sums):
        if abs(value.imag) > 1e-2 * max(abs(value.real), 1e-300):
            log.warning("chain %d kernel %s: imaginary residue %.3e",
                        chain, name, value.imag)
        means[name] = float(value.real)
    return ChainRecord(accepted=accepted, proposed=proposed,
                       kernel_means=means)


def run_metropolis(cfg: MetropolisRunConfig, kernels=None,
                   workers: int = 1) -> MetropolisResult:
    """Sample the weight-tilted noise distribution at the target time."""
    if cfg.sim.gauge.kind is not GaugeKind.REAL:
        raise UnsupportedConfigurationError(
            "Metropolis sampling requires the REAL gauge"
        )
    kernels = list(DEFAULT_KERNELS if kernels is None else kernels)
    args = [(cfg, kernels, c) for c in range(cfg.n_chains)]
    chains = _map_units(_metropolis_chain_unit, args, workers)
    estimates = {}
    for name, _ in kernels:
        est = combine_series(
            np.array([[c.kernel_means[name]] for c in chains]))
        estimates[name] = est[0]
    return MetropolisResult(target_time=cfg.target_time,
                            estimates=estimates, chains=chains)


# ---------------------------------------------------------------------------
# population branching

def branch_population(theta: np.ndarray, phi: np.ndarray, omega: np.ndarray,
                      rng: np.random.Generator):
    """One branching event: clone in proportion to weight, reset weights to 1.

    Each member spawns floor(Omega_i / mean(Omega) + u_i) copies with an
    independent uniform u_i, which preserves the weighted mean of any
    observable and the expected population size.
    """
    weights = np.exp(np.real(omega))
    mean_weight = np.mean(weights)
    if not mean_weight > 0:
        raise PopulationExtinctionError("mean weight vanished before branching")
    u = rng.uniform(size=weights.size)
    clones = np.floor(weights / mean_weight + u).astype(np.int64)
    if clones.sum() == 0:
        raise PopulationExtinctionError("population went extinct at branching")
    idx = np.repeat(np.arange(weights.size), clones)
    return theta[idx], phi[idx], np.zeros(idx.size, dtype=complex)


def _heun_step_arrays(theta, phi, omega, dw, cfg: SimConfig):
    """Vectorised Heun step for the REAL gauge; dw has shape (n, 4)."""
    gauge = cfg.gauge
    dt = cfg.dt
    sq = np.sqrt(dt)
    th1 = theta + 0.5 * np.exp(-gauge.A) * (dw[:, 0] - 1j * dw[:, 1]) * sq
    h0, h1 = _phi_drift(theta, gauge), _phi_drift(th1, gauge)
    noise_phi = (-0.5 * np.exp(gauge.A) * (dw[:, 0] + 1j * dw[:, 1])
                 + gauge.lam * (dw[:, 2] + 1j * dw[:, 3])) * sq
    g0, g1 = _g4(theta, gauge), _g4(th1, gauge)
    omega1 = omega + (-0.25 * (g0 ** 2 + g1 ** 2) * dt
                      + 0.5 * (g0 + g1) * sq * dw[:, 3])
    return th1, phi + 0.5 * (h0 + h1) * dt + noise_phi, omega1


def _branching_population_unit(args):
    cfg, kernels, pop = args
    sim = cfg.sim
    rng = _unit_rng(cfg.seed, pop)
    n = cfg.n_pop
    theta = np.full(n, 0.5 * np.log(sim.nbar), dtype=complex)
    phi = np.zeros(n, dtype=complex)
    omega = np.zeros(n, dtype=complex)
    saved = set(sim.saved_indices().tolist())
    spb = cfg.steps_per_branch

    means = {name: [] for name, _ in kernels}
    omega_means = []
    sizes = []

    def record():
        weights = np.exp(np.real(omega))
        denom = 2.0 * np.sum(weights)
        for name, spec in kernels:
            num = _kernel_numerators(theta, phi, weights, spec)
            means[name].append(float(np.real(num)) / denom)
        omega_means.append(float(np.mean(weights)))

    if 0 in saved:
        record()
    for k in range(1, sim.n_steps + 1):
        dw = rng.standard_normal((theta.size, 4))
        theta, phi, omega = _heun_step_arrays(theta, phi, omega, dw, sim)
        if k in saved:
            record()
        if k % spb == 0:
            theta, phi, omega = branch_population(theta, phi, omega, rng)
            sizes.append(theta.size)
    return means, omega_means, sizes


def run_branching(cfg: BranchingRunConfig, kernels=None,
                  workers: int = 1) -> BranchingResult:
    """Evolve weighted populations with periodic cloning of heavy trajectories."""
    if cfg.sim.gauge.kind is not GaugeKind.REAL:
        raise UnsupportedConfigurationError(
            "branching requires the REAL gauge"
        )
    kernels = list(DEFAULT_KERNELS if kernels is None else kernels)
    args = [(cfg, kernels, p) for p in range(cfg.n_populations)]
    results = _map_units(_branching_population_unit, args, workers)
    times = cfg.sim.saved_indices() * cfg.sim.dt
    moments: dict[str, list[MomentEstimate]] = {}
    for name, _ in kernels:
        matrix = np.array([r[0][name] for r in results])
        moments[name] = combine_series(matrix)
    omega_matrix = np.array([r[1] for r in results])
    series = MomentSeries(times=times, moments=moments,
                          omega_mean=combine_series(omega_matrix))
    sizes = np.array([r[2] for r in results])
    return BranchingResult(series=series, population_sizes=sizes)
