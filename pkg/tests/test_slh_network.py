"""
Tests for SLH triples and their series composition.
"""
import math
import os
import sys
import unittest

import numpy as np
from scipy.stats import unitary_group

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from src.models.chain import ChainSpec
from src.models.operators import Operator, identity
from src.services.model_builder import build_model, chain_layout, model_from_slh
from src.services.slh_network import (
    SLHTriple, beamsplitter_triple, identity_triple, qubit_triple, series_compose,
)


class SLHNetworkTest(unittest.TestCase):
    """Test cases for network elements and the cascade product."""

    def setUp(self):
        self.layout = chain_layout(1)
        self.rng = np.random.default_rng(3)

    def test_cascade_reproduces_direct_model(self):
        for eta in (0.0, 0.3, 0.7, 1.0):
            for _ in range(3):
                spec = ChainSpec(gamma=self.rng.uniform(0.2, 3.0), eta=eta,
                                 omega_a=self.rng.uniform(0.0, 2.0), omega_b=self.rng.uniform(0.0, 2.0),
                                 delta=self.rng.uniform(-1.0, 1.0))
                self.assertTrue(model_from_slh(spec).allclose(build_model(spec), atol=1e-12),
                                f'cascade differs from direct model at eta={eta}')

    def test_cascade_with_hopping_and_t1(self):
        spec = ChainSpec(n=2, gamma=1.3, eta=math.sqrt(0.9), omega_a=0.4, omega_b=0.6, j=(0.8,), t1=40.0,
                         t1_overrides={'B2': 25.0})
        self.assertTrue(model_from_slh(spec).allclose(build_model(spec), atol=1e-12))

    def test_identity_is_neutral(self):
        g = qubit_triple(0.3, 0.8, 1.2, 'A1', self.layout)
        composed = series_compose(identity_triple(2, self.layout), g)
        np.testing.assert_allclose(composed.S, g.S)
        for a, b in zip(composed.L, g.L):
            self.assertTrue(a.allclose(b, atol=1e-14))
        self.assertTrue(composed.H.allclose(g.H, atol=1e-14))

    def random_triple(self):
        dim = self.layout.total_dim
        shape = (dim, dim)
        L = tuple(Operator(self.layout, self.rng.normal(size=shape) + 1j * self.rng.normal(size=shape))
                  for _ in range(2))
        h = self.rng.normal(size=shape) + 1j * self.rng.normal(size=shape)
        S = unitary_group.rvs(2, random_state=self.rng)
        return SLHTriple(S, L, Operator(self.layout, 0.5 * (h + h.conj().T)))

    def test_series_product_is_associative(self):
        for _ in range(3):
            a, b, c = self.random_triple(), self.random_triple(), self.random_triple()
            left = series_compose(series_compose(a, b), c)
            right = series_compose(a, series_compose(b, c))
            np.testing.assert_allclose(left.S, right.S, atol=1e-10)
            for x, y in zip(left.L, right.L):
                self.assertTrue(x.allclose(y, atol=1e-10))
            self.assertTrue(left.H.allclose(right.H, atol=1e-10))

    def test_beamsplitter_is_unitary(self):
        for eta in (0.0, 0.5, 1.0):
            S = beamsplitter_triple(eta, self.layout).S
            np.testing.assert_allclose(S.conj().T @ S, np.eye(2), atol=1e-14)
        with self.assertRaises(ValueError):
            beamsplitter_triple(1.5, self.layout)

    def test_preconditions(self):
        with self.assertRaises(ValueError):
            qubit_triple(0.0, 1.0, -1.0, 'A1', self.layout)
        with self.assertRaises(ValueError):
            series_compose(identity_triple(3, self.layout), identity_triple(2, self.layout))
        zero = 0.0 * identity(self.layout)
        with self.assertRaises(ValueError):
            SLHTriple(np.array([[1.0, 1.0], [0.0, 1.0]]), (zero, zero), zero)
        with self.assertRaises(ValueError):
            SLHTriple(np.eye(2), (zero,), zero)

    def test_zero_ports_dropped_from_lindblad(self):
        model = qubit_triple(0.0, 1.0, 1.0, 'A1', self.layout).to_lindblad()
        self.assertEqual(len(model.collapse_ops), 1)


if __name__ == '__main__':
    unittest.main()
