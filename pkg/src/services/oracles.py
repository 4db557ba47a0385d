"""
Closed-form steady states and rate formulas for the driven double chain.

All states live on the chain layout A1, B1, A2, B2, ... and are returned
normalized. Pair states are written per site, e.g. |S1 T2> is the singlet on
(A1, B1) times the triplet on (A2, B2).
"""
import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple

import numpy as np

from src.models.operators import Operator, PureState, bell_state
from src.services.model_builder import chain_layout

logger = logging.getLogger(__name__)

_PAIR = {
    '0': np.array([1, 0, 0, 0], dtype=complex),
    'S': bell_state('S').amplitudes,
    'T': bell_state('T').amplitudes,
}
MAX_HOLE_PAIR_SITES = 4


def pair_product(pattern, coefficient=1.0):
    """Amplitudes of coefficient * |X1 Y2 ...> for a pattern string such as 'ST0'."""
    return coefficient * reduce(np.kron, [_PAIR[p] for p in pattern])


def _state(n, terms):
    amplitudes = sum(pair_product(pattern, coefficient) for pattern, coefficient in terms)
    return PureState(chain_layout(n), amplitudes).normalize()


def _require_positive(**rates):
    for name, value in rates.items():
        if not value > 0:
            raise ValueError(f'{name} must be positive, got {value}')


def psi0(omega, delta, gamma):
    """
    Dark state of the lossless driven pair, |00> - sqrt2 omega / (2 delta + i gamma) |S>.
    """
    _require_positive(gamma=gamma)
    return _state(1, [('0', 1.0), ('S', -math.sqrt(2.0) * omega / (2.0 * delta + 1j * gamma))])


def psi2(omega, gamma, j12):
    """
    Dark state of the lossless 2+2 chain,
    -|0 0> + omega/(sqrt2 J12) |0 T> + i omega^2/(gamma J12) |S T>.
    """
    _require_positive(gamma=gamma, j12=j12)
    return _state(2, [
        ('00', -1.0),
        ('0T', omega / (math.sqrt(2.0) * j12)),
        ('ST', 1j * omega ** 2 / (gamma * j12)),
    ])


def psi3(omega, gamma, j12, j23):
    """Dark state of the lossless 3+3 chain."""
    _require_positive(omega=omega, gamma=gamma, j12=j12, j23=j23)
    ratio = j23 / j12
    return _state(3, [
        ('00S', 1.0),
        ('0TS', -omega / (math.sqrt(2.0) * j12)),
        ('STS', -1j * omega ** 2 / (gamma * j12)),
        ('S00', -ratio),
        ('000', 1j * ratio * gamma / (math.sqrt(2.0) * omega)),
    ])


def _hole_operator(site, n, layout):
    # sqrt2 |0_j><S_j| on odd sites, sqrt2 |0_j><T_j| on even sites
    bell = _PAIR['S'] if site % 2 == 1 else _PAIR['T']
    local = math.sqrt(2.0) * np.outer(_PAIR['0'], bell.conj())
    factors = [local if k == site else np.eye(4) for k in range(1, n + 1)]
    return Operator(layout, reduce(np.kron, factors))


def psiN_holepair(spec):
    """
    Hole-pair condensate steady state of a lossless, symmetrically driven chain:

        (1 - i gamma/(2 omega) tau_1) exp[-i gamma/(2 omega^2) sum_j (-1)^j J_j tau_j tau_{j+1}] |S T S T ...>

    The exponent is nilpotent on the reference state, so the series is summed
    until it terminates.

    Args:
        spec (ChainSpec): Chain with eta = 1, delta = 0, omega_a = omega_b > 0

    Returns:
        PureState: Normalized steady state on chain_layout(spec.n)
    """
    if spec.eta != 1.0:
        raise ValueError(f'hole-pair state needs a lossless waveguide (eta = 1), got eta={spec.eta}')
    if spec.delta != 0.0 or spec.omega_a != spec.omega_b:
        raise ValueError('hole-pair state needs zero detuning and symmetric drives')
    if spec.n > MAX_HOLE_PAIR_SITES:
        raise ValueError(f'hole-pair state supports n <= {MAX_HOLE_PAIR_SITES}, got n={spec.n}')
    _require_positive(omega=spec.omega_a)
    n, omega, gamma = spec.n, spec.omega_a, spec.gamma
    layout = chain_layout(n)
    taus = [_hole_operator(site, n, layout) for site in range(1, n + 1)]

    reference = pair_product(''.join('S' if site % 2 == 1 else 'T' for site in range(1, n + 1)))
    exponent = np.zeros((layout.total_dim,) * 2, dtype=complex)
    for bond, rate in enumerate(spec.j, start=1):
        exponent += (-1) ** bond * rate * (taus[bond - 1] @ taus[bond]).matrix
    exponent *= -1j * gamma / (2.0 * omega ** 2)

    state, term = reference.copy(), reference.copy()
    for order in range(1, n + 1):
        term = exponent @ term / order
        if not np.any(term):
            break
        state = state + term
    state = state - 1j * gamma / (2.0 * omega) * (taus[0].matrix @ state)
    return PureState(layout, state).normalize()


@dataclass(frozen=True)
class DarkStateReport:
    """
    Attributes:
        collapse_norms (tuple): ||c_k psi|| per collapse operator
        hamiltonian_norm (float): ||H psi - <H> psi||
        energy (float): <psi|H|psi>
        tol (float): Threshold every norm must stay below
    """
    collapse_norms: tuple
    hamiltonian_norm: float
    energy: float
    tol: float

    @property
    def passed(self):
        return all(value < self.tol for value in self.collapse_norms + (self.hamiltonian_norm,))

    def to_dict(self):
        return {
            'collapse_norms': list(self.collapse_norms),
            'hamiltonian_norm': self.hamiltonian_norm,
            'energy': self.energy,
            'tol': self.tol,
            'passed': self.passed,
        }


def verify_dark_state(state, model, tol=1e-9):
    """Check that state is annihilated by every collapse operator and is an eigenstate of H."""
    if state.layout != model.layout:
        raise ValueError(f'layout mismatch: {state.layout.labels} vs {model.layout.labels}')
    psi = state.normalize().amplitudes
    norms = tuple(float(np.linalg.norm(op.matrix @ psi)) for op in model.collapse_ops)
    h_psi = model.H.matrix @ psi
    energy = complex(np.vdot(psi, h_psi))
    report = DarkStateReport(norms, float(np.linalg.norm(h_psi - energy * psi)), energy.real, tol)
    logger.debug('Dark-state check: %s', report.to_dict())
    return report


def pure_state_concurrence(state):
    """2 |a00 a11 - a01 a10| of the normalized two-qubit state."""
    if state.layout.dims != (2, 2):
        raise ValueError(f'expected a two-qubit state, got dims {state.layout.dims}')
    a = state.normalize().amplitudes
    return float(2.0 * abs(a[0] * a[3] - a[1] * a[2]))


def psi0_concurrence(omega, delta, gamma):
    return 2.0 * omega ** 2 / (4.0 * delta ** 2 + gamma ** 2 + 2.0 * omega ** 2)


def singlet_population(omega, gamma, j12):
    """Weight of the site-1 singlet in the lossless 2+2 steady state."""
    _require_positive(gamma=gamma, j12=j12)
    x, j = omega / gamma, j12 / gamma
    return 2.0 * x ** 4 / (2.0 * x ** 4 + x ** 2 + 2.0 * j ** 2)


class RateEstimates(NamedTuple):
    gamma_loss: float
    gamma_rel: float


def rate_estimates(omega, gamma, j12, eta):
    """
    Loss rate n1 (1 - eta^2) gamma of the storage pair and its relaxation
    rate gamma_eff^3 / omega_eff^2 in the weak-drive limit.
    """
    _require_positive(omega=omega, gamma=gamma, j12=j12)
    omega_eff = 2.0 * omega * j12 / gamma
    gamma_eff = 4.0 * j12 ** 2 / gamma
    gamma_loss = singlet_population(omega, gamma, j12) * (1.0 - eta ** 2) * gamma
    return RateEstimates(gamma_loss, gamma_eff ** 3 / omega_eff ** 2)
