"""
Effective master equation of the storage pair of a 2+2 chain.

The closed form and a numerical projection-based elimination of the
waveguide-coupled pair are both provided so one can be checked against the other.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from src.models.chain import LindbladModel, ZERO_OPERATOR_NORM
from src.models.operators import Operator, SubsystemLayout, pauli
from src.utils.errors import SolverError

logger = logging.getLogger(__name__)

STORAGE_LABELS = ('A2', 'B2')


@dataclass(frozen=True, eq=False)
class EffectiveModel:
    """
    Attributes:
        omega_eff (float): 2 omega J12 / gamma
        gamma_eff (float): 4 J12^2 / gamma
        eta (float): Transmission amplitude, not renormalized
        model (LindbladModel): Two-qubit model on (A2, B2)
    """
    omega_eff: float
    gamma_eff: float
    eta: float
    model: LindbladModel


def effective_model(omega, gamma, j12, eta):
    """
    Weak-drive effective model of the storage pair:

        H = (omega_eff/2)[sx_A + (2 eta - 1) sx_B] + i(eta gamma_eff/2)(s+_A s-_B - h.c.)
        jumps sqrt(gamma_eff)(eta s-_A + s-_B) and sqrt(gamma_eff (1 - eta^2)) s-_A
    """
    if not gamma > 0:
        raise ValueError(f'gamma must be positive, got {gamma}')
    if omega < 0 or j12 < 0:
        raise ValueError('omega and j12 must be non-negative')
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f'eta must lie in [0, 1], got {eta}')
    omega_eff = 2.0 * omega * j12 / gamma
    gamma_eff = 4.0 * j12 ** 2 / gamma

    layout = SubsystemLayout.qubits(STORAGE_LABELS)
    sm_a, sm_b = pauli('A2', 'minus', layout), pauli('B2', 'minus', layout)
    exchange = sm_a.dag() @ sm_b
    H = (0.5 * omega_eff * (pauli('A2', 'x', layout) + (2.0 * eta - 1.0) * pauli('B2', 'x', layout))
         + 0.5j * eta * gamma_eff * (exchange - exchange.dag()))
    root = math.sqrt(gamma_eff)
    jumps = (root * (eta * sm_a + sm_b), root * math.sqrt(1.0 - eta ** 2) * sm_a)
    return EffectiveModel(omega_eff, gamma_eff, eta, LindbladModel(layout, H, jumps))


def _site_one_indices(layout):
    # ground manifold: A1, B1 both in |0>; excited: exactly one of them in |1>
    a1, b1 = layout.index('A1'), layout.index('B1')
    n = len(layout)
    ground, excited = [], []
    for index in range(layout.total_dim):
        bits = [(index >> (n - 1 - k)) & 1 for k in range(n)]
        occupation = bits[a1] + bits[b1]
        if occupation == 0:
            ground.append(index)
        elif occupation == 1:
            excited.append(index)
    return np.array(ground), np.array(excited)


def restricted_nh_inverse(model):
    """
    Inverse of H_NH = P_e H P_e - (i/2) P_e sum_k c_k^dag c_k P_e on the
    singly-excited manifold of the (A1, B1) pair.

    Returns:
        tuple: (indices, inverse) with indices the full-space basis states of
        the manifold in increasing order and inverse a square matrix on them

    Raises:
        SolverError: if H_NH is singular on the manifold
    """
    _, excited = _site_one_indices(model.layout)
    decay = sum((op.dag() @ op).matrix for op in model.collapse_ops)
    nh = model.H.matrix - 0.5j * decay
    block = nh[np.ix_(excited, excited)]
    try:
        inverse = np.linalg.inv(block)
    except np.linalg.LinAlgError as e:
        raise SolverError(f'non-Hermitian Hamiltonian is singular on the excited manifold: {e}') from e
    return excited, inverse


def _fix_phase(matrix):
    flat = matrix.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat))]
    return matrix * (abs(pivot) / pivot)


def adiabatic_eliminate(model_2p2, spec):
    """
    Eliminate the waveguide-coupled pair of a 2+2 model by projection.

    H_eff = H_g - (1/2) V_- [H_NH^-1 + (H_NH^-1)^dag] V_+
    L_k   = c_k H_NH^-1 V_+

    The identity part a of each jump is moved into the Hamiltonian through
    D[X + a] = D[X] - i[(i a* X / 2 + h.c.), .], then the storage qubits are
    rotated by +pi/2 (A2) and -pi/2 (B2) about z.

    Args:
        model_2p2 (LindbladModel): Full model on A1, B1, A2, B2
        spec (ChainSpec): Spec the model was built from, n must be 2

    Returns:
        LindbladModel: Effective model on (A2, B2)
    """
    if spec.n != 2 or model_2p2.layout.labels != ('A1', 'B1', 'A2', 'B2'):
        raise ValueError('adiabatic elimination needs a 2+2 model on layout A1, B1, A2, B2')
    ground, excited = _site_one_indices(model_2p2.layout)
    H = model_2p2.H.matrix

    v_plus = H[np.ix_(excited, ground)]
    v_minus = H[np.ix_(ground, excited)]
    _, inverse = restricted_nh_inverse(model_2p2)

    h_eff = H[np.ix_(ground, ground)] - 0.5 * v_minus @ (inverse + inverse.conj().T) @ v_plus
    jumps = [op.matrix[np.ix_(ground, excited)] @ inverse @ v_plus for op in model_2p2.collapse_ops]

    dim = len(ground)
    for k, jump in enumerate(jumps):
        constant = np.trace(jump) / dim
        traceless = jump - constant * np.eye(dim)
        h_eff = h_eff + 0.5j * (np.conj(constant) * traceless - constant * traceless.conj().T)
        jumps[k] = traceless

    rotation = np.kron(np.diag([1.0, 1j]), np.diag([1.0, -1j]))
    h_eff = rotation @ h_eff @ rotation.conj().T
    h_eff = 0.5 * (h_eff + h_eff.conj().T)

    layout = SubsystemLayout.qubits(STORAGE_LABELS)
    collapse = []
    for jump in jumps:
        jump = rotation @ jump @ rotation.conj().T
        if np.linalg.norm(jump) > ZERO_OPERATOR_NORM:
            collapse.append(Operator(layout, _fix_phase(jump)))
    logger.debug('Eliminated site-1 pair: %d effective jumps', len(collapse))
    return LindbladModel(layout, Operator(layout, h_eff), tuple(collapse))
