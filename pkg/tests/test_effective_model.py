"""
Tests for the storage-pair effective model and the numerical adiabatic elimination.
"""
import math
import os
import sys
import unittest

import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from src.models.chain import ChainSpec
from src.services.effective_model import adiabatic_eliminate, effective_model, restricted_nh_inverse
from src.services.entanglement import concurrence, pair_concurrence
from src.services.lindblad_engine import steady_state
from src.services.model_builder import build_model


class AdiabaticEliminationTest(unittest.TestCase):
    """Numerical elimination against the closed-form effective model."""

    def setUp(self):
        self.rng = np.random.default_rng(99)

    def test_matches_closed_form(self):
        for _ in range(10):
            gamma = float(self.rng.uniform(0.5, 2.0))
            omega = float(self.rng.uniform(0.01, 0.5))
            j12 = float(self.rng.uniform(0.01, 0.5))
            eta = float(self.rng.uniform(0.3, 1.0))
            spec = ChainSpec(n=2, gamma=gamma, eta=eta, omega_a=omega, omega_b=omega, j=(j12,))
            numeric = adiabatic_eliminate(build_model(spec), spec)
            closed = effective_model(omega, gamma, j12, eta).model
            self.assertTrue(numeric.allclose(closed, atol=1e-10),
                            f'elimination differs at gamma={gamma}, omega={omega}, j12={j12}, eta={eta}')

    def test_lossless_elimination_has_one_jump(self):
        spec = ChainSpec(n=2, omega_a=0.1, omega_b=0.1, j=(0.05,))
        numeric = adiabatic_eliminate(build_model(spec), spec)
        self.assertEqual(len(numeric.collapse_ops), 1)
        self.assertTrue(numeric.allclose(effective_model(0.1, 1.0, 0.05, 1.0).model, atol=1e-10))

    def test_restricted_inverse(self):
        gamma, eta = 1.3, 0.8
        spec = ChainSpec(n=2, gamma=gamma, eta=eta, omega_a=0.4, omega_b=0.2, j=(0.3,))
        indices, inverse = restricted_nh_inverse(build_model(spec))
        self.assertEqual(list(indices), list(range(4, 12)))
        # basis order (B1 excited, A1 excited) times the storage pair
        expected = np.kron((2j / gamma) * np.array([[1.0, -2.0 * eta], [0.0, 1.0]]), np.eye(4))
        np.testing.assert_allclose(inverse, expected, atol=1e-12)

    def test_requires_two_by_two_chain(self):
        spec = ChainSpec()
        with self.assertRaises(ValueError):
            adiabatic_eliminate(build_model(spec), spec)

    def test_effective_rates(self):
        effective = effective_model(0.02, 1.0, 0.01, math.sqrt(0.9))
        self.assertAlmostEqual(effective.omega_eff, 4e-4)
        self.assertAlmostEqual(effective.gamma_eff, 4e-4)
        with self.assertRaises(ValueError):
            effective_model(0.1, 0.0, 0.1, 1.0)


class WeakDriveAgreementTest(unittest.TestCase):
    """The full 2+2 chain and the effective storage pair agree at weak drive."""

    def test_outer_pair_concurrence(self):
        eta = math.sqrt(0.9)
        omega = 0.02
        for ratio in (0.5, 1.0, 2.0):
            j12 = ratio * omega
            spec = ChainSpec(n=2, eta=eta, omega_a=omega, omega_b=omega, j=(j12,))
            full = pair_concurrence(steady_state(build_model(spec)).rho, 2)
            reduced = concurrence(steady_state(effective_model(omega, 1.0, j12, eta).model).rho)
            print(f'\nJ12/omega={ratio}: full {full:.4f}, effective {reduced:.4f}')
            self.assertAlmostEqual(full, reduced, delta=0.01)

    def test_concurrence_saturates_at_weak_drive(self):
        eta = math.sqrt(0.9)
        values = []
        for omega in (1e-2, 3e-3, 1e-3):
            spec = ChainSpec(n=2, eta=eta, omega_a=omega, omega_b=omega, j=(omega,))
            values.append(pair_concurrence(steady_state(build_model(spec)).rho, 2))
        self.assertLess(max(values) - min(values), 0.01)

    def test_effective_concurrence_is_drive_independent(self):
        # omega_eff / gamma_eff = omega / (2 J12) is fixed when J12 = omega
        eta = math.sqrt(0.9)
        values = [concurrence(steady_state(effective_model(omega, 1.0, omega, eta).model).rho)
                  for omega in (1e-2, 1e-3, 1e-4)]
        self.assertGreater(values[0], 0.0)
        np.testing.assert_allclose(values, values[0], atol=1e-8)


if __name__ == '__main__':
    unittest.main()
