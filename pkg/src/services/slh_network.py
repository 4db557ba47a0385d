"""
SLH triples for cascaded input-output networks.

Scattering matrices here are scalar multiples of the identity, so S is stored
as a plain complex (n, n) array while L and H carry Operators on the shared
layout of the whole network.
"""
import math
from dataclasses import dataclass

import numpy as np

from src.models.chain import LindbladModel
from src.models.operators import Operator, identity, pauli

UNITARY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SLHTriple:
    """
    Network element (S, L, H).

    Attributes:
        S (ndarray): (n, n) complex scattering matrix
        L (tuple): n coupling Operators, one per port
        H (Operator): Internal Hamiltonian
    """
    S: np.ndarray
    L: tuple
    H: Operator

    def __post_init__(self):
        S = np.array(self.S, dtype=complex)
        S.setflags(write=False)
        L = tuple(self.L)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ValueError(f'scattering matrix must be square, got shape {S.shape}')
        if len(L) != S.shape[0]:
            raise ValueError(f'{S.shape[0]} ports need {S.shape[0]} coupling operators, got {len(L)}')
        if not np.allclose(S.conj().T @ S, np.eye(S.shape[0]), rtol=0.0, atol=UNITARY_TOL):
            raise ValueError('scattering matrix is not unitary')
        if any(op.layout != self.H.layout for op in L):
            raise ValueError('coupling operators and Hamiltonian must share one layout')
        scale = max(1.0, float(np.max(np.abs(self.H.matrix))))
        if not self.H.is_hermitian(tol=UNITARY_TOL * scale):
            raise ValueError('SLH Hamiltonian is not Hermitian')
        object.__setattr__(self, 'S', S)
        object.__setattr__(self, 'L', L)

    @property
    def n_ports(self):
        return self.S.shape[0]

    @property
    def layout(self):
        return self.H.layout

    def to_lindblad(self):
        """Master equation generated by the triple: H plus one collapse operator per port."""
        return LindbladModel(self.layout, self.H, self.L)


def identity_triple(n_ports, layout):
    zero = 0.0 * identity(layout)
    return SLHTriple(np.eye(n_ports), (zero,) * n_ports, zero)


def qubit_triple(delta, omega, gamma, site_label, layout):
    """
    Driven, detuned qubit emitting into port 0 of a two-port network.

    Args:
        delta (float): Detuning, enters as (delta/2) sigma_z
        omega (float): Rabi drive, enters as (omega/2) sigma_x
        gamma (float): Emission rate into the waveguide
        site_label (str): Qubit the triple refers to
        layout (SubsystemLayout): Layout of the whole network

    Returns:
        SLHTriple: S = I, L = (sqrt(gamma) sigma_minus, 0)
    """
    if gamma < 0:
        raise ValueError(f'gamma must be non-negative, got {gamma}')
    H = 0.5 * delta * pauli(site_label, 'z', layout) + 0.5 * omega * pauli(site_label, 'x', layout)
    L = (math.sqrt(gamma) * pauli(site_label, 'minus', layout), 0.0 * identity(layout))
    return SLHTriple(np.eye(2), L, H)


def beamsplitter_triple(eta, layout):
    """Partially transmitting waveguide segment; 1 - eta**2 of the amplitude is scattered into port 1."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f'eta must lie in [0, 1], got {eta}')
    leak = math.sqrt(1.0 - eta ** 2)
    zero = 0.0 * identity(layout)
    return SLHTriple(np.array([[eta, -leak], [leak, eta]]), (zero, zero), zero)


def series_compose(g2, g1):
    """
    Feed the output of g1 into g2.

    (S2, L2, H2) <| (S1, L1, H1) = (S2 S1, L2 + S2 L1,
    H1 + H2 + (L2^dag S2 L1 - L1^dag S2^dag L2) / 2i)
    """
    if g1.n_ports != g2.n_ports:
        raise ValueError(f'cannot compose a {g2.n_ports}-port triple with a {g1.n_ports}-port triple')
    if g1.layout != g2.layout:
        raise ValueError(f'layout mismatch: {g2.layout.labels} vs {g1.layout.labels}')
    n = g1.n_ports
    S = g2.S @ g1.S
    L = []
    for i in range(n):
        op = g2.L[i]
        for k in range(n):
            if g2.S[i, k] != 0:
                op = op + g2.S[i, k] * g1.L[k]
        L.append(op)
    cross = 0.0 * identity(g1.layout)
    for i in range(n):
        for k in range(n):
            if g2.S[i, k] != 0:
                cross = cross + g2.S[i, k] * (g2.L[i].dag() @ g1.L[k])
    H = g1.H + g2.H + (cross - cross.dag()) / 2j
    H = Operator(H.layout, 0.5 * (H.matrix + H.matrix.conj().T))
    return SLHTriple(S, tuple(L), H)
