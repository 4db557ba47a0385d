"""
Tests for the dense operator algebra: layouts, Pauli embedding, tensor products and partial traces.
"""
import os
import sys
import unittest

import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from src.models.operators import (
    DensityMatrix, Operator, PureState, SubsystemLayout, basis_state, bell_state, expectation, identity,
    partial_trace, pauli, permute_sites, projector, relabel, tensor, trace_distance,
)


def random_density(rng, layout):
    dim = layout.total_dim
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return DensityMatrix(layout, rho / np.trace(rho))


class OperatorAlgebraTest(unittest.TestCase):
    """Test cases for operator construction and arithmetic."""

    def setUp(self):
        self.layout = SubsystemLayout.qubits(('A', 'B'))
        self.rng = np.random.default_rng(7)

    def test_layout_validation(self):
        with self.assertRaises(ValueError):
            SubsystemLayout(('A', 'A'), (2, 2))
        with self.assertRaises(ValueError):
            SubsystemLayout(('A',), (2, 2))
        self.assertEqual(self.layout.total_dim, 4)
        self.assertIn('B', self.layout)
        with self.assertRaises(ValueError):
            self.layout.index('C')

    def test_pauli_relations(self):
        sx = pauli('A', 'x', self.layout)
        sy = pauli('A', 'y', self.layout)
        sz = pauli('A', 'z', self.layout)
        self.assertTrue((sx @ sx).allclose(identity(self.layout)))
        self.assertTrue((sx @ sy - sy @ sx).allclose(2j * sz))
        self.assertTrue(sx.is_hermitian())
        self.assertFalse(pauli('A', 'minus', self.layout).is_hermitian())
        with self.assertRaises(ValueError):
            pauli('C', 'x', self.layout)
        with self.assertRaises(ValueError):
            pauli('A', 'w', self.layout)

    def test_lowering_operator_convention(self):
        # sigma_minus |1> = |0> and sigma_z |0> = +|0>
        lowered = pauli('A', 'minus', self.layout).matrix @ basis_state('10', self.layout).amplitudes
        np.testing.assert_allclose(lowered, basis_state('00', self.layout).amplitudes)
        ground = basis_state('00', self.layout)
        self.assertAlmostEqual(expectation(pauli('A', 'z', self.layout), ground).real, 1.0)

    def test_tensor_and_permute(self):
        a = Operator(SubsystemLayout.qubits(('A',)), self.rng.normal(size=(2, 2)))
        b = Operator(SubsystemLayout.qubits(('B',)), self.rng.normal(size=(2, 2)))
        ab = tensor(a, b)
        self.assertEqual(ab.layout.labels, ('A', 'B'))
        self.assertTrue(permute_sites(ab, ('B', 'A')).allclose(tensor(b, a)))
        with self.assertRaises(ValueError):
            tensor(a, a)

    def test_relabel_keeps_matrix(self):
        op = pauli('A', 'x', self.layout)
        renamed = relabel(op, {'A': 'A2', 'B': 'B2'})
        self.assertEqual(renamed.layout.labels, ('A2', 'B2'))
        np.testing.assert_array_equal(renamed.matrix, op.matrix)

    def test_layout_mismatch_raises(self):
        other = SubsystemLayout.qubits(('C', 'D'))
        with self.assertRaises(ValueError):
            pauli('A', 'x', self.layout) + pauli('C', 'x', other)


class StateTest(unittest.TestCase):
    """Test cases for pure states, density matrices and partial traces."""

    def setUp(self):
        self.layout = SubsystemLayout.qubits(('A', 'B'))
        self.rng = np.random.default_rng(11)

    def test_bell_states(self):
        singlet, triplet = bell_state('S'), bell_state('T')
        self.assertAlmostEqual(singlet.norm(), 1.0)
        self.assertAlmostEqual(abs(singlet.overlap(triplet)), 0.0)
        self.assertAlmostEqual(singlet.amplitudes[1].real, -singlet.amplitudes[2].real)
        with self.assertRaises(ValueError):
            bell_state('X')

    def test_density_matrix_validation(self):
        with self.assertRaises(ValueError):
            DensityMatrix(self.layout, np.eye(4))
        with self.assertRaises(ValueError):
            DensityMatrix(self.layout, np.diag([1.5, -0.5, 0, 0]))
        non_hermitian = np.diag([0.5, 0.5, 0, 0]).astype(complex)
        non_hermitian[0, 1] = 0.1
        with self.assertRaises(ValueError):
            DensityMatrix(self.layout, non_hermitian)
        self.assertAlmostEqual(DensityMatrix.maximally_mixed(self.layout).purity(), 0.25)

    def test_partial_trace_of_product(self):
        rho_a = random_density(self.rng, SubsystemLayout.qubits(('A',)))
        rho_b = random_density(self.rng, SubsystemLayout.qubits(('B',)))
        joint = DensityMatrix(self.layout, np.kron(rho_a.matrix, rho_b.matrix))
        np.testing.assert_allclose(partial_trace(joint, {'A'}).matrix, rho_a.matrix, atol=1e-12)
        np.testing.assert_allclose(partial_trace(joint, {'B'}).matrix, rho_b.matrix, atol=1e-12)

    def test_partial_trace_linearity(self):
        layout = SubsystemLayout.qubits(('A1', 'B1', 'A2'))
        for _ in range(10):
            rho, sigma = random_density(self.rng, layout), random_density(self.rng, layout)
            p = self.rng.uniform()
            mixed = DensityMatrix(layout, p * rho.matrix + (1 - p) * sigma.matrix)
            expected = (p * partial_trace(rho, {'A1', 'A2'}).matrix
                        + (1 - p) * partial_trace(sigma, {'A1', 'A2'}).matrix)
            np.testing.assert_allclose(partial_trace(mixed, {'A2', 'A1'}).matrix, expected, atol=1e-12)

    def test_trace_distance_and_projector(self):
        up, down = basis_state('00', self.layout), basis_state('11', self.layout)
        rho, sigma = DensityMatrix.from_pure(up), DensityMatrix.from_pure(down)
        self.assertAlmostEqual(trace_distance(rho, sigma), 1.0)
        self.assertAlmostEqual(trace_distance(rho, rho), 0.0)
        np.testing.assert_allclose(projector(up).matrix, rho.matrix)

    def test_pure_state_arithmetic(self):
        state = basis_state('01', self.layout) + (-1.0) * basis_state('10', self.layout)
        self.assertIsInstance(state, PureState)
        self.assertAlmostEqual(state.fidelity(PureState(self.layout, bell_state('S').amplitudes)), 1.0)
        with self.assertRaises(ValueError):
            (0.0 * state).normalize()


if __name__ == '__main__':
    unittest.main()
