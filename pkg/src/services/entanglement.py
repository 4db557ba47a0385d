"""
Two-qubit entanglement and state-quality metrics.
"""
import logging

import numpy as np
import scipy.linalg

from src.models.operators import bell_state, expectation, partial_trace, projector

logger = logging.getLogger(__name__)

_SPIN_FLIP = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))
NEGATIVE_CLIP = -1e-10
IMAG_TOL = 1e-8


def _require_two_qubits(rho):
    if rho.layout.dims != (2, 2):
        raise ValueError(f'expected a two-qubit state, got dims {rho.layout.dims}')


def _psd_sqrt(matrix):
    w, v = scipy.linalg.eigh(0.5 * (matrix + matrix.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def concurrence(rho):
    """
    Wootters concurrence max(0, l1 - l2 - l3 - l4), where l_i are the
    decreasing square roots of the eigenvalues of rho (Y kron Y) rho* (Y kron Y).

    Args:
        rho (DensityMatrix): Two-qubit state

    Returns:
        float: Concurrence in [0, 1]
    """
    _require_two_qubits(rho)
    matrix = rho.matrix
    flipped = _SPIN_FLIP @ matrix.conj() @ _SPIN_FLIP
    eigenvalues = scipy.linalg.eigvals(matrix @ flipped)
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    if np.max(np.abs(eigenvalues.imag)) > IMAG_TOL * scale or np.min(eigenvalues.real) < NEGATIVE_CLIP:
        # Same spectrum from the Hermitian form sqrt(rho) rho~ sqrt(rho)
        root = _psd_sqrt(matrix)
        hermitian = root @ flipped @ root
        eigenvalues = scipy.linalg.eigvalsh(0.5 * (hermitian + hermitian.conj().T))
        logger.debug('Concurrence used the Hermitian eigenvalue form')
    roots = np.sqrt(np.clip(np.real(eigenvalues), 0.0, None))
    roots = np.sort(roots)[::-1]
    value = roots[0] - roots[1] - roots[2] - roots[3]
    return float(min(1.0, max(0.0, value)))


def pair_concurrence(rho, site):
    """Concurrence of the pair (A_site, B_site) after tracing out everything else."""
    return concurrence(partial_trace(rho, {f'A{site}', f'B{site}'}))


def outer_pair_concurrence(rho, spec):
    if spec.n < 2:
        raise ValueError(f'outer-pair concurrence needs n >= 2, got n={spec.n}')
    return pair_concurrence(rho, spec.n)


def purity(rho):
    return rho.purity()


def bell_fidelity(rho, which):
    """<Bell|rho|Bell> for the singlet ('S') or triplet ('T') on the two qubits of rho."""
    _require_two_qubits(rho)
    target = projector(bell_state(which, rho.layout.labels))
    return float(np.real(expectation(target, rho)))
