"""
Tests for the Liouvillian, steady-state solver, time evolution and spectral gap.
"""
import math
import os
import sys
import unittest

import numpy as np
import scipy.linalg

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from src.models.chain import ChainSpec, LindbladModel
from src.models.operators import DensityMatrix, SubsystemLayout, basis_state, pauli, trace_distance
from src.services.entanglement import concurrence
from src.services.lindblad_engine import (
    build_liouvillian, evolve, lindblad_rhs, liouvillian_residual, relaxation_time, spectral_gap,
    steady_state, unvec, vec,
)
from src.services.model_builder import build_model, chain_layout
from src.services.oracles import psi0, rate_estimates
from src.utils.errors import DegenerateSteadyStateError, SolverError


def random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


class LiouvillianTest(unittest.TestCase):
    """Test cases for the vectorized generator."""

    def setUp(self):
        self.rng = np.random.default_rng(5)
        self.model = build_model(ChainSpec(n=2, eta=math.sqrt(0.8), omega_a=0.7, omega_b=0.4, delta=0.2,
                                           j=(0.9,), t1=30.0))

    def test_matches_direct_right_hand_side(self):
        liouvillian = build_liouvillian(self.model)
        for _ in range(5):
            rho = random_density(self.rng, self.model.dim)
            np.testing.assert_allclose(liouvillian.apply(rho), lindblad_rhs(self.model, rho), atol=1e-12)

    def test_vec_round_trip(self):
        matrix = self.rng.normal(size=(4, 4))
        np.testing.assert_array_equal(unvec(vec(matrix), 4), matrix)
        self.assertEqual(vec(matrix)[1], matrix[1, 0])

    def test_trace_preserving(self):
        matrix = build_liouvillian(self.model).matrix
        identity_row = vec(np.eye(self.model.dim)).conj()
        np.testing.assert_allclose(identity_row @ matrix, 0.0, atol=1e-12)

    def test_spectrum(self):
        spec = ChainSpec(eta=math.sqrt(0.9), omega_a=0.8, omega_b=1.1, delta=0.3)
        eigenvalues = scipy.linalg.eigvals(build_liouvillian(build_model(spec)).matrix)
        self.assertLess(np.min(np.abs(eigenvalues)), 1e-10)
        self.assertTrue(np.all(eigenvalues.real < 1e-10))

    def test_single_qubit_spectrum(self):
        layout = SubsystemLayout.qubits(['Q'])
        model = LindbladModel(layout, 0.0 * pauli('Q', 'z', layout), (math.sqrt(1.3) * pauli('Q', 'minus', layout),))
        eigenvalues = np.sort_complex(scipy.linalg.eigvals(build_liouvillian(model).matrix))
        np.testing.assert_allclose(eigenvalues, [-1.3, -0.65, -0.65, 0.0], atol=1e-12)
        self.assertAlmostEqual(spectral_gap(model), 0.65, places=12)

    def test_dense_limit(self):
        with self.assertRaises(ValueError):
            build_liouvillian(self.model, max_dim=8)


class SteadyStateTest(unittest.TestCase):
    """Test cases for steady_state."""

    def test_lossless_pair_closed_form(self):
        for ratio in (0.25, 0.5, 1.0, 2.0, 4.0):
            result = steady_state(build_model(ChainSpec(omega_a=ratio, omega_b=ratio)))
            expected = 2 * ratio ** 2 / (2 * ratio ** 2 + 1)
            self.assertAlmostEqual(concurrence(result.rho), expected, delta=1e-6)
            self.assertLessEqual(result.residual, 1e-8)

    def test_lossless_steady_state_is_the_dark_state(self):
        spec = ChainSpec(gamma=1.4, omega_a=0.9, omega_b=0.9, delta=0.35)
        result = steady_state(build_model(spec))
        dark = DensityMatrix.from_pure(psi0(0.9, 0.35, 1.4))
        self.assertLess(trace_distance(result.rho, dark), 1e-7)

    def test_undriven_pair_relaxes_to_vacuum(self):
        for eta in (1.0, math.sqrt(0.9)):
            result = steady_state(build_model(ChainSpec(eta=eta, omega_a=0.0, omega_b=0.0)))
            self.assertAlmostEqual(result.rho.matrix[0, 0].real, 1.0, places=8)
            self.assertAlmostEqual(concurrence(result.rho), 0.0, places=8)

    def test_no_collapse_operators(self):
        layout = chain_layout(1)
        model = LindbladModel(layout, pauli('A1', 'x', layout), ())
        with self.assertRaises(DegenerateSteadyStateError):
            steady_state(model)

    def test_degenerate_null_space(self):
        # B1 decays, A1 is isolated: any state of A1 is stationary
        layout = chain_layout(1)
        model = LindbladModel(layout, 0.0 * pauli('A1', 'z', layout), (pauli('B1', 'minus', layout),))
        with self.assertRaises(DegenerateSteadyStateError):
            steady_state(model)

    def test_tolerance_is_enforced(self):
        with self.assertRaises(SolverError):
            steady_state(build_model(ChainSpec(eta=math.sqrt(0.9))), tol=1e-30)

    def test_residual_of_pure_state(self):
        spec = ChainSpec(gamma=0.8, omega_a=0.5, omega_b=0.5, delta=-0.4)
        self.assertLess(liouvillian_residual(build_model(spec), psi0(0.5, -0.4, 0.8)), 1e-12)


class EvolutionTest(unittest.TestCase):
    """Test cases for evolve and the spectral gap."""

    def test_long_time_limit_matches_steady_state(self):
        spec = ChainSpec(eta=math.sqrt(0.9), omega_a=1.0, omega_b=1.0)
        model = build_model(spec)
        gap = spectral_gap(model)
        rho0 = DensityMatrix.from_pure(basis_state('00', model.layout))
        trace = evolve(model, rho0, np.linspace(0.0, 30.0 / gap, 6))
        self.assertEqual(len(trace), 6)
        self.assertLess(trace.max_trace_drift, 1e-6)
        final = trace.states[-1]
        self.assertLess(trace_distance(final, steady_state(model).rho), 1e-5)
        values = trace.metric(concurrence)
        self.assertAlmostEqual(values[0], 0.0)

    def test_lossless_pair_reaches_two_thirds(self):
        model = build_model(ChainSpec())
        rho0 = DensityMatrix.from_pure(basis_state('00', model.layout))
        trace = evolve(model, rho0, np.linspace(0.0, 50.0, 11))
        self.assertAlmostEqual(concurrence(trace.states[-1]), 2.0 / 3.0, delta=1e-3)

    def test_storage_chain_long_time_limit(self):
        spec = ChainSpec(n=2, eta=math.sqrt(0.9), omega_a=0.5, omega_b=0.5, j=(0.5,))
        model = build_model(spec)
        gap = spectral_gap(model)
        rho0 = DensityMatrix.from_pure(basis_state('0000', model.layout))
        final = evolve(model, rho0, np.linspace(0.0, 30.0 / gap, 3)).states[-1]
        self.assertLess(trace_distance(final, steady_state(model).rho), 1e-4)

    def test_weak_drive_gap_follows_relaxation_estimate(self):
        for eta2 in (1.0, 0.9):
            spec = ChainSpec(n=2, eta=math.sqrt(eta2), omega_a=0.02, omega_b=0.02, j=(0.02,))
            ratio = spectral_gap(build_model(spec)) / rate_estimates(0.02, 1.0, 0.02, math.sqrt(eta2)).gamma_rel
            self.assertTrue(1 / 20 <= ratio <= 20, f'gap / Gamma_rel = {ratio:.3g} at eta2={eta2}')

    def test_gap_of_degenerate_model_raises(self):
        layout = chain_layout(1)
        model = LindbladModel(layout, 0.0 * pauli('A1', 'z', layout), (pauli('B1', 'minus', layout),))
        with self.assertRaises(DegenerateSteadyStateError):
            spectral_gap(model)

    def test_grid_must_increase(self):
        model = build_model(ChainSpec())
        rho0 = DensityMatrix.from_pure(basis_state('00', model.layout))
        with self.assertRaises(ValueError):
            evolve(model, rho0, [0.0, 1.0, 0.5])
        self.assertEqual(len(evolve(model, rho0, [0.0])), 1)

    def test_relaxation_time_is_inverse_gap(self):
        model = build_model(ChainSpec(eta=math.sqrt(0.95), omega_a=0.6, omega_b=0.6))
        gap = spectral_gap(model)
        self.assertGreater(gap, 0.0)
        self.assertAlmostEqual(relaxation_time(model), 1.0 / gap)
        self.assertAlmostEqual(steady_state(model, compute_gap=True).gap, gap)

    def test_gap_scales_inverse_square_with_drive(self):
        ratios = np.geomspace(2.0, 10.0, 6)
        gaps = [spectral_gap(build_model(ChainSpec(omega_a=r, omega_b=r))) for r in ratios]
        slope = np.polyfit(np.log(ratios), np.log(gaps), 1)[0]
        print(f'\nGap slope over omega/gamma in [2, 10]: {slope:.3f}')
        self.assertAlmostEqual(slope, -2.0, delta=0.2)


if __name__ == '__main__':
    unittest.main()
