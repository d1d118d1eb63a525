"""The sqrt(N) reduction and analytic pointer reconstruction.

The authoritative oracle for both is full N-body integration; the
reconstruction formula additionally carries its own spreading-law check.
"""

import math

import numpy as np
import pytest

from bohmsim.integrate import IntegratorOptions, integrate_trajectory
from bohmsim.model import Configuration, ModeError, single_pointer_params, two_pointer_params
from bohmsim.reduced import (ReducedState, reconstruct_pointers, reduced_params,
                             reduced_velocity, spreading_factor)
from bohmsim.velocity import velocity_analytic

from conftest import config, fig4_n_particles, spread_z0

OPTS = IntegratorOptions(rel_tol=1e-10, abs_tol=1e-12)


class TestReducedVelocity:
    def test_identity_at_n1(self, fig4_params):
        state = ReducedState(1.3, 0.8, 0.25)
        vx, vs = reduced_velocity(state, fig4_params)
        v = velocity_analytic(config(1.3, 0.8, 0.0, [0.25]), fig4_params)
        assert vx == v.dx
        assert vs == v.dz[0]

    def test_sqrt_n_is_an_effective_velocity(self):
        # N = 100 at Xi = 1 must equal N = 1 at Xi = 10, state for state
        p100 = single_pointer_params(10, 10, 1, 0.2, 1, 3, Xi=1.0, n_particles=100)
        p1 = single_pointer_params(10, 10, 1, 0.2, 1, 3, Xi=10.0, n_particles=1)
        state = ReducedState(0.7, 2.1, 0.4)
        assert reduced_velocity(state, p100) == reduced_velocity(state, p1)

    def test_doubling_n_matches_parameter_map_bitwise(self):
        pn = single_pointer_params(10, 10, 1, 0.2, 1, 3, Xi=1.0, n_particles=4)
        pm = single_pointer_params(10, 10, 1, 0.2, 1, 3, Xi=2.0, n_particles=1)
        assert reduced_params(pn).pointer_velocities == reduced_params(pm).pointer_velocities
        init = Configuration(0.0, 3.0, 0.0, (0.15,) * 4)
        init1 = Configuration(0.0, 3.0, 0.0, (0.3,))
        a = integrate_trajectory(init, pn, OPTS, backend="reduced")
        b = integrate_trajectory(init1, pm, OPTS, backend="reduced")
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.sigma_hat, b.sigma_hat)

    def test_two_pointer_mode_rejected(self):
        p = two_pointer_params(10, 10, 1, 0.2, 1, 3, Xi=10.0)
        with pytest.raises(ModeError):
            reduced_velocity(ReducedState(0.1, 1.0, 0.0), p)
        with pytest.raises(ModeError):
            integrate_trajectory(Configuration(0.0, 3.0, 0.0, (0.0, 0.0)), p,
                                 backend="reduced")

    def test_full_system_oracle_n10(self):
        params = fig4_n_particles(10)
        init = Configuration(0.0, 2.6, 0.0, spread_z0(10, sigma_hat0=0.1))
        full = integrate_trajectory(init, params, OPTS, backend="full-analytic")
        red = integrate_trajectory(init, params, OPTS, backend="reduced")
        assert np.max(np.abs(full.sigma_hat - red.sigma_hat)) <= 1e-6
        assert np.max(np.abs(full.x - red.x)) <= 1e-6


class TestReconstruction:
    def test_initial_condition_exact(self, fig4_params):
        params = fig4_n_particles(5)
        z0 = np.array(spread_z0(5, sigma_hat0=0.3))
        t = np.array([0.0])
        sigma = np.array([z0.sum() / math.sqrt(5)])
        z = reconstruct_pointers(t, sigma, z0, params)
        assert np.allclose(z[0], z0, atol=1e-15)

    def test_equal_starts_ride_the_mean(self):
        params = fig4_n_particles(4)
        t = np.linspace(0.0, 6.0, 7)
        sigma = 0.3 * t + 0.1
        z0 = np.full(4, sigma[0] / math.sqrt(4))  # all equal, scaled sum matches sigma[0]
        z = reconstruct_pointers(t, sigma, z0, params)
        expect = sigma / math.sqrt(4)
        for j in range(4):
            assert np.allclose(z[:, j], expect, atol=1e-14)

    def test_against_full_integration_n5(self):
        params = fig4_n_particles(5)
        z0 = spread_z0(5, sigma_hat0=0.2)
        init = Configuration(0.0, 2.8, 0.0, z0)
        full = integrate_trajectory(init, params, OPTS, backend="full-analytic")
        red = integrate_trajectory(init, params, OPTS, backend="reduced")
        assert np.max(np.abs(full.z - red.z)) <= 1e-6

    def test_closure_to_1e12(self):
        params = fig4_n_particles(7)
        z0 = np.array(spread_z0(7, sigma_hat0=-0.4))
        t = np.linspace(0.0, 7.5, 100)
        sigma = -0.4 + 0.05 * t + 0.01 * t**2
        z = reconstruct_pointers(t, sigma, z0, params)
        closure = z.sum(axis=1) / math.sqrt(7)
        assert np.max(np.abs(closure - sigma)) <= 1e-12

    def test_sum_mismatch_rejected(self):
        params = fig4_n_particles(3)
        with pytest.raises(ValueError):
            reconstruct_pointers(np.array([0.0]), np.array([1.0]),
                                 np.zeros(3), params)

    def test_wrong_count_rejected(self):
        params = fig4_n_particles(3)
        with pytest.raises(ValueError):
            reconstruct_pointers(np.array([0.0]), np.array([0.0]),
                                 np.zeros(5), params)

    def test_deviations_follow_packet_spreading(self, fig4_params):
        # uncoupled pointer: every Z'_n(t') = Z'_n(0) * s(t') exactly
        params = single_pointer_params(10, 10, 1, 0.2, 1, 3, Xi=0.0, n_particles=3)
        z0 = (0.5, -0.2, 0.9)
        init = Configuration(0.0, 2.8, 0.0, z0)
        traj = integrate_trajectory(init, params, OPTS, backend="full-analytic")
        s = np.asarray(spreading_factor(traj.t, params))
        expect = np.outer(s, np.array(z0))
        assert np.max(np.abs(traj.z - expect)) <= 1e-8


class TestSqrtNEquivalence:
    @pytest.mark.parametrize("n", [1, 4, 9, 16])
    def test_full_vs_reduced(self, n):
        params = fig4_n_particles(n)
        init = Configuration(0.0, 3.2, 0.0, spread_z0(n))
        full = integrate_trajectory(init, params, backend="full-analytic")
        red = integrate_trajectory(init, params, backend="reduced")
        tol = 10 * max(IntegratorOptions().rel_tol * 100.0, 1e-7)
        assert np.max(np.abs(full.x - red.x)) <= tol
        assert np.max(np.abs(full.sigma_hat - red.sigma_hat)) <= tol
