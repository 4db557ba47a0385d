"""
Builders turning a ChainSpec into the master equation of the driven double chain.
"""
import logging
import math

from src.models.chain import LindbladModel
from src.models.operators import SubsystemLayout, Operator, pauli
from src.services.slh_network import beamsplitter_triple, qubit_triple, series_compose

logger = logging.getLogger(__name__)


def chain_layout(n):
    """Qubit layout A1, B1, A2, B2, ..., An, Bn."""
    if n < 1:
        raise ValueError(f'chain length must be at least 1, got {n}')
    return SubsystemLayout.qubits(f'{chain}{site}' for site in range(1, n + 1) for chain in 'AB')


def _hopping(spec, layout):
    terms = []
    for bond, rate in enumerate(spec.j, start=1):
        if rate == 0:
            continue
        for chain in 'AB':
            left, right = f'{chain}{bond}', f'{chain}{bond + 1}'
            term = pauli(left, 'plus', layout) @ pauli(right, 'minus', layout)
            terms.append(rate * (term + term.dag()))
    return terms


def _intrinsic_decay(spec, layout):
    ops = []
    for label in layout.labels:
        t1 = spec.t1_for(label)
        if t1 is not None:
            ops.append(math.sqrt(1.0 / t1) * pauli(label, 'minus', layout))
    return ops


def build_model(spec):
    """
    Master equation of the chain written down directly.

    H = drives and detuning on A1, B1 + chiral exchange i(eta gamma/2)(s+_A1 s-_B1 - h.c.)
        + mirror-symmetric hopping along both chains.
    Collapse operators: sqrt(gamma)(eta s-_A1 + s-_B1), sqrt(gamma (1 - eta^2)) s-_A1,
    then sqrt(1/T1) s- on every qubit that has a relaxation time.

    Args:
        spec (ChainSpec): Chain parameters

    Returns:
        LindbladModel: Model on chain_layout(spec.n)
    """
    layout = chain_layout(spec.n)
    sm_a, sm_b = pauli('A1', 'minus', layout), pauli('B1', 'minus', layout)
    exchange = sm_a.dag() @ sm_b

    H = (0.5 * spec.omega_a * pauli('A1', 'x', layout)
         + 0.5 * spec.omega_b * pauli('B1', 'x', layout)
         + 0.5 * spec.delta * (pauli('A1', 'z', layout) - pauli('B1', 'z', layout))
         + 0.5j * spec.eta * spec.gamma * (exchange - exchange.dag()))
    for term in _hopping(spec, layout):
        H = H + term

    root_gamma = math.sqrt(spec.gamma)
    collapse = [
        root_gamma * (spec.eta * sm_a + sm_b),
        root_gamma * math.sqrt(1.0 - spec.eta ** 2) * sm_a,
    ]
    collapse.extend(_intrinsic_decay(spec, layout))
    logger.debug('Built model n=%d gamma=%g eta=%g with %d collapse terms',
                 spec.n, spec.gamma, spec.eta, len(collapse))
    return LindbladModel(layout, H, tuple(collapse))


def model_from_slh(spec):
    """
    Same model derived by cascading qubit_B <| beamsplitter(eta) <| qubit_A.

    Hopping and intrinsic decay are not network elements and are added after
    composition.
    """
    layout = chain_layout(spec.n)
    qubit_a = qubit_triple(spec.delta, spec.omega_a, spec.gamma, 'A1', layout)
    qubit_b = qubit_triple(-spec.delta, spec.omega_b, spec.gamma, 'B1', layout)
    network = series_compose(qubit_b, series_compose(beamsplitter_triple(spec.eta, layout), qubit_a))

    H = network.H
    for term in _hopping(spec, layout):
        H = H + term
    H = Operator(layout, 0.5 * (H.matrix + H.matrix.conj().T))
    collapse = list(network.L) + _intrinsic_decay(spec, layout)
    return LindbladModel(layout, H, tuple(collapse))
