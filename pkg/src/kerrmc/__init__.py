"""Monte Carlo sampling of weighted stochastic-gauge trajectories."""

from .errors import (DivergenceError, InvalidParameterError,
                     InvalidSpectrumError, PopulationExtinctionError,
                     UnsupportedConfigurationError)
from .estimators import (MomentEstimate, MomentSeries, WeightedSample, combine,
                         metropolis_estimate, weighted_moment)
from .integrator import SimConfig, Trajectory, evolve, final_weight, step
from .model import (GaugeKind, GaugeParams, MomentKernelSpec, PhaseState,
                    complex_gauge_drift, drift, gauge_g4, initial_state,
                    moment_kernel, noise_coefficients, number_kernel,
                    quadx_kernel)
from .noise import (NoisePath, SpectrumPath, from_spectrum, mutate, sample,
                    sensitivity_scan, to_spectrum)
from .oracle import (collapse_envelope, exact_X_rotating, fock_moments)
from .samplers import (BranchingRunConfig, ChainRecord, MetropolisRunConfig,
                       StochasticRunConfig, run_branching, run_metropolis,
                       run_stochastic)

__version__ = "0.1.0"
