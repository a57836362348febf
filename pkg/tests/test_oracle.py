"""Unit tests for the exact Fock-basis reference dynamics."""

import numpy as np
import pytest

from kerrmc import (InvalidParameterError, collapse_envelope, exact_X_rotating,
                    fock_moments)
from kerrmc.oracle import coherent_state, default_cutoff


class TestExactX:
    def test_tau_zero(self):
        assert exact_X_rotating(100.0, 0.0) == pytest.approx(10.0)

    def test_known_value(self):
        assert exact_X_rotating(100.0, 0.1) == pytest.approx(6.067, abs=1e-3)

    def test_full_revival(self):
        assert exact_X_rotating(100.0, 2.0 * np.pi) == pytest.approx(10.0)

    def test_rejects_bad_nbar(self):
        with pytest.raises(InvalidParameterError):
            exact_X_rotating(0.0, 0.1)


class TestEnvelope:
    def test_tau_zero(self):
        assert collapse_envelope(100.0, 0.0) == pytest.approx(10.0)

    def test_one_collapse_time(self):
        assert collapse_envelope(100.0, 0.1) == pytest.approx(10.0 / np.e)

    def test_tracks_exact_within_factor_two(self):
        for tau in np.linspace(0.0, 0.1, 21):
            exact = abs(exact_X_rotating(100.0, tau))
            approx = collapse_envelope(100.0, tau)
            assert approx / 2.0 <= max(exact, 1e-12) <= approx * 2.0


class TestCoherentState:
    def test_normalised(self):
        state = coherent_state(100.0, 200)
        assert np.sum(np.abs(state.amplitudes) ** 2) == pytest.approx(
            1.0, abs=1e-10)

    def test_default_cutoff_sufficient(self):
        for nbar in (1.0, 10.0, 100.0, 1000.0):
            coherent_state(nbar, default_cutoff(nbar))  # must not raise

    def test_rejects_small_cutoff(self):
        with pytest.raises(InvalidParameterError):
            coherent_state(100.0, 110)


class TestFockMoments:
    def test_tau_zero_moments(self):
        a_mean, n_mean, x = fock_moments(100.0, 0.0)
        assert a_mean == pytest.approx(10.0 + 0.0j, abs=1e-8)
        assert n_mean == pytest.approx(100.0, abs=1e-10)
        assert x == pytest.approx(10.0, abs=1e-8)

    def test_number_conserved(self):
        for tau in (0.0, 0.03, 0.1, 1.0):
            _, n_mean, _ = fock_moments(100.0, tau)
            assert n_mean == pytest.approx(100.0, abs=1e-10)

    def test_matches_closed_form(self):
        for tau in np.linspace(0.0, 0.1, 11):
            _, _, x = fock_moments(100.0, tau, cutoff=200)
            assert abs(x - exact_X_rotating(100.0, tau)) < 1e-8

    def test_matches_closed_form_full_period(self):
        for tau in np.linspace(0.0, 2.0 * np.pi, 25):
            _, _, x = fock_moments(100.0, tau, cutoff=200)
            assert abs(x - exact_X_rotating(100.0, tau)) < 1e-8

    def test_norm_conserved_under_evolution(self):
        state = coherent_state(100.0, 200)
        n = np.arange(201)
        evolved = state.amplitudes * np.exp(-0.5j * n * (n - 1) * 0.37)
        assert np.sum(np.abs(evolved) ** 2) == pytest.approx(
            np.sum(np.abs(state.amplitudes) ** 2), abs=1e-12)
