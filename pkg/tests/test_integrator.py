"""Unit tests for the Heun SDE integrator and its vectorised ensemble path."""

import numpy as np
import pytest

from kerrmc import (GaugeKind, GaugeParams, InvalidParameterError, SimConfig,
                    evolve, final_weight, initial_state, step)
from kerrmc.integrator import evolve_paths, final_omegas, final_phase_points
from kerrmc.noise import NoisePath


class TestSimConfig:
    def test_rejects_non_integer_step_count(self, real_gauge):
        with pytest.raises(InvalidParameterError):
            SimConfig(nbar=100.0, total_time=0.00105, dt=1e-4,
                      gauge=real_gauge)

    def test_rejects_dt_above_total_time(self, real_gauge):
        with pytest.raises(InvalidParameterError):
            SimConfig(nbar=100.0, total_time=1e-4, dt=1e-3, gauge=real_gauge)

    def test_rejects_nonpositive_parameters(self, real_gauge):
        with pytest.raises(InvalidParameterError):
            SimConfig(nbar=0.0, total_time=0.01, dt=1e-4, gauge=real_gauge)
        with pytest.raises(InvalidParameterError):
            SimConfig(nbar=100.0, total_time=0.01, dt=1e-4, gauge=real_gauge,
                      save_stride=0)

    def test_saved_indices_cover_endpoints(self, small_sim):
        idx = small_sim.saved_indices()
        assert idx[0] == 0
        assert idx[-1] == small_sim.n_steps
        assert np.all(np.diff(idx) > 0)


class TestStep:
    def test_zero_increments_deterministic_limit(self, real_gauge):
        state = initial_state(100.0)
        dt = 1e-4
        out = step(state, np.zeros(4), dt, real_gauge)
        assert out.theta == state.theta
        assert out.omega_log == 0.0
        assert out.phi == pytest.approx(0.5 * dt)

    def test_single_noise_increment_moves_theta(self, real_gauge):
        state = initial_state(100.0)
        dt = 1e-4
        out = step(state, np.array([1.0, 0.0, 0.0, 0.0]), dt, real_gauge)
        gained = out.theta.real - state.theta.real
        assert gained == pytest.approx(0.5 * np.exp(-2.0) * np.sqrt(dt))

    def test_noise_free_flow_is_second_order(self, real_gauge):
        # two half steps vs one full step on phi: discrepancy O(dt^3) locally
        state = initial_state(100.0)
        errors = []
        for dt in (1e-2, 5e-3):
            full = step(state, np.zeros(4), dt, real_gauge)
            half = step(step(state, np.zeros(4), dt / 2, real_gauge),
                        np.zeros(4), dt / 2, real_gauge)
            errors.append(abs(full.phi - half.phi))
        # halving dt should shrink the local defect by ~8; theta stays put so
        # the phi drift is constant here and the defect is exactly zero
        assert errors[0] <= max(8.5 * errors[1], 1e-14)

    def test_rejects_wrong_increment_count(self, real_gauge):
        with pytest.raises(InvalidParameterError):
            step(initial_state(100.0), np.zeros(3), 1e-4, real_gauge)


class TestEvolve:
    def test_zero_path_final_weight_one(self, small_sim):
        path = NoisePath(np.zeros((4, small_sim.n_steps)))
        traj = evolve(path, small_sim)
        assert traj.final_weight == 1.0
        assert traj.thetas[-1] == traj.thetas[0]

    def test_determinism_bit_for_bit(self, small_sim, rng):
        values = rng.standard_normal((4, small_sim.n_steps))
        a = evolve(NoisePath(values), small_sim)
        b = evolve(NoisePath(values.copy()), small_sim)
        assert np.array_equal(a.thetas, b.thetas)
        assert np.array_equal(a.phis, b.phis)
        assert np.array_equal(a.omegas, b.omegas)
        assert a.final_weight == b.final_weight

    def test_times_cover_run(self, small_sim, rng):
        traj = evolve(NoisePath(rng.standard_normal((4, small_sim.n_steps))),
                      small_sim)
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(small_sim.total_time)

    def test_rejects_shape_mismatch(self, small_sim, rng):
        with pytest.raises(InvalidParameterError):
            evolve(NoisePath(rng.standard_normal((4, 7))), small_sim)
        with pytest.raises(InvalidParameterError):
            evolve(NoisePath(rng.standard_normal((2, small_sim.n_steps))),
                   small_sim)

    def test_matches_step_loop(self, small_sim, rng):
        """The vectorised path must agree step-for-step with repeated step()."""
        values = rng.standard_normal((4, small_sim.n_steps))
        traj = evolve(NoisePath(values), small_sim)
        state = initial_state(small_sim.nbar)
        states = [state]
        for k in range(small_sim.n_steps):
            state = step(state, values[:, k], small_sim.dt, small_sim.gauge)
            states.append(state)
        for j, k in enumerate(small_sim.saved_indices()):
            assert traj.thetas[j] == pytest.approx(states[k].theta, abs=1e-12)
            assert traj.phis[j] == pytest.approx(states[k].phi, abs=1e-10)
            assert traj.omegas[j] == pytest.approx(states[k].omega_log,
                                                   abs=1e-12)


class TestFinalWeight:
    def test_zero_path(self, small_sim):
        assert final_weight(NoisePath(np.zeros((4, small_sim.n_steps))),
                            small_sim) == 1.0

    def test_equals_evolve_final_weight(self, small_sim, rng):
        for _ in range(5):
            path = NoisePath(rng.standard_normal((4, small_sim.n_steps)))
            assert final_weight(path, small_sim) == \
                evolve(path, small_sim).final_weight

    def test_positive_for_real_gauge(self, small_sim, rng):
        values = rng.standard_normal((50, 4, small_sim.n_steps))
        weights = np.exp(np.real(final_omegas(values, small_sim)))
        assert np.all(weights > 0)


class TestEnsemble:
    def test_final_phase_points_matches_evolve_paths(self, small_sim, rng):
        values = rng.standard_normal((20, 4, small_sim.n_steps))
        _, th, phi, om = evolve_paths(values, small_sim)
        th_f, phi_f, om_f = final_phase_points(values, small_sim)
        assert np.array_equal(th[:, -1], th_f)
        assert np.array_equal(phi[:, -1], phi_f)
        assert np.array_equal(om[:, -1], om_f)

    def test_theta_is_exactly_gaussian(self, small_sim, rng):
        # theta has no drift and constant noise: after k steps the real part
        # has variance k dt exp(-2A)/4; check within 5 sigma of the
        # chi-square sampling band
        n = 4000
        values = rng.standard_normal((n, 4, small_sim.n_steps))
        _, th, _, _ = evolve_paths(values, small_sim)
        k = small_sim.saved_indices()[-1]
        expected = 0.25 * np.exp(-2.0 * small_sim.gauge.A) * k * small_sim.dt
        observed = np.var(th[:, -1].real)
        sigma = expected * np.sqrt(2.0 / (n - 1))
        assert abs(observed - expected) < 5 * sigma

    def test_martingale_small_ensemble(self, real_gauge, rng):
        sim = SimConfig(nbar=100.0, total_time=0.02, dt=1e-4, gauge=real_gauge)
        n = 4000
        om = final_omegas(rng.standard_normal((n, 4, sim.n_steps)), sim)
        weights = np.exp(np.real(om))
        stderr = np.std(weights) / np.sqrt(n)
        assert abs(np.mean(weights) - 1.0) < 3 * stderr

    def test_step_halving_stability(self, real_gauge):
        """Refining dt with a shared Brownian path moves <X(T)> less than
        the statistical error of the coarse estimate."""
        coarse = SimConfig(nbar=100.0, total_time=0.02, dt=2e-4,
                           gauge=real_gauge, save_stride=100)
        fine = SimConfig(nbar=100.0, total_time=0.02, dt=1e-4,
                         gauge=real_gauge, save_stride=200)
        rng = np.random.default_rng(7)
        n = 1000
        w_fine = rng.standard_normal((n, 4, fine.n_steps))
        # pairwise-summed increments give the same Brownian path at 2 dt
        w_coarse = (w_fine[:, :, ::2] + w_fine[:, :, 1::2]) / np.sqrt(2.0)

        def weighted_x(values, sim):
            _, th, phi, om = evolve_paths(values, sim)
            w = np.exp(np.real(om[:, -1]))
            x = np.exp(th[:, -1]) * np.cos(phi[:, -1])
            return np.real(np.sum(w * x)) / np.sum(w), w, np.real(x)

        x_c, w, x = weighted_x(w_coarse, coarse)
        x_f, _, _ = weighted_x(w_fine, fine)
        stderr = np.std(w * x) / (np.mean(w) * np.sqrt(n))
        assert abs(x_c - x_f) < stderr

    def test_complex_gauge_weight_goes_complex(self, complex_gauge, rng):
        sim = SimConfig(nbar=100.0, total_time=0.01, dt=1e-4,
                        gauge=complex_gauge)
        values = rng.standard_normal((100, 2, sim.n_steps))
        om = final_omegas(values, sim)
        assert np.max(np.abs(om.imag)) > 0.0

    def test_none_gauge_weight_frozen(self, rng):
        gauge = GaugeParams(kind=GaugeKind.NONE, nbar_frame=100.0)
        sim = SimConfig(nbar=100.0, total_time=0.01, dt=1e-4, gauge=gauge)
        values = rng.standard_normal((50, 2, sim.n_steps))
        om = final_omegas(values, sim)
        assert np.all(om == 0.0)
