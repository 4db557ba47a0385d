"""
Dense operator algebra over chains of two-level systems.

Basis convention: |0> is the ground state and |1> the excited state of every
site, sigma_z = diag(1, -1) and sigma_minus |1> = |0>. Site order inside a
layout is the tensor-factor order (leftmost label = most significant index).
"""
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

DEFAULT_ATOL = 1e-10

_SINGLE_SITE = {
    'x': np.array([[0, 1], [1, 0]], dtype=complex),
    'y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'z': np.array([[1, 0], [0, -1]], dtype=complex),
    'plus': np.array([[0, 0], [1, 0]], dtype=complex),
    'minus': np.array([[0, 1], [0, 0]], dtype=complex),
}


def _frozen_array(values, dtype=complex):
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SubsystemLayout:
    """
    Ordered tensor factorization of a Hilbert space.

    Attributes:
        labels (tuple): Site names, e.g. ('A1', 'B1', 'A2', 'B2')
        dims (tuple): Dimension of every site (2 for qubits)
    """
    labels: tuple
    dims: tuple

    def __post_init__(self):
        object.__setattr__(self, 'labels', tuple(self.labels))
        object.__setattr__(self, 'dims', tuple(int(d) for d in self.dims))
        if not self.dims:
            raise ValueError('layout must contain at least one site')
        if len(self.labels) != len(self.dims):
            raise ValueError('labels and dims must have the same length')
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f'layout labels must be unique, got {self.labels}')
        if any(d < 1 for d in self.dims):
            raise ValueError(f'site dimensions must be positive, got {self.dims}')

    @classmethod
    def qubits(cls, labels):
        """Layout of two-level sites with the given labels."""
        labels = tuple(labels)
        return cls(labels, (2,) * len(labels))

    @property
    def total_dim(self):
        return int(np.prod(self.dims))

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f'unknown site label {label!r}; layout has {self.labels}') from None

    def __contains__(self, label):
        return label in self.labels

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class Operator:
    """
    Dense complex matrix tagged with the layout it acts on.

    Hermiticity is not required; collapse operators are not Hermitian.
    """
    layout: SubsystemLayout
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen_array(self.matrix)
        dim = self.layout.total_dim
        if matrix.shape != (dim, dim):
            raise ValueError(f'operator matrix has shape {matrix.shape}, layout needs ({dim}, {dim})')
        object.__setattr__(self, 'matrix', matrix)

    def dag(self):
        return Operator(self.layout, self.matrix.conj().T)

    def is_hermitian(self, tol=DEFAULT_ATOL):
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=tol))

    def norm(self):
        """Frobenius norm."""
        return float(np.linalg.norm(self.matrix))

    def _check_layout(self, other):
        if other.layout != self.layout:
            raise ValueError(f'layout mismatch: {self.layout.labels} vs {other.layout.labels}')

    def __add__(self, other):
        self._check_layout(other)
        return Operator(self.layout, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check_layout(other)
        return Operator(self.layout, self.matrix - other.matrix)

    def __neg__(self):
        return Operator(self.layout, -self.matrix)

    def __matmul__(self, other):
        self._check_layout(other)
        return Operator(self.layout, self.matrix @ other.matrix)

    def __mul__(self, scalar):
        return Operator(self.layout, complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Operator(self.layout, self.matrix / complex(scalar))

    def allclose(self, other, atol=DEFAULT_ATOL):
        return other.layout == self.layout and bool(
            np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol))


@dataclass(frozen=True, eq=False)
class PureState:
    """
    State vector on a layout. Construction does not normalize; closed-form dark
    states are built unnormalized and compared by overlap modulus.
    """
    layout: SubsystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen_array(self.amplitudes).reshape(-1)
        if amplitudes.shape != (self.layout.total_dim,):
            raise ValueError(
                f'state has {amplitudes.size} amplitudes, layout needs {self.layout.total_dim}')
        object.__setattr__(self, 'amplitudes', amplitudes)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self):
        norm = self.norm()
        if norm == 0.0:
            raise ValueError('cannot normalize the zero vector')
        return PureState(self.layout, self.amplitudes / norm)

    def overlap(self, other):
        """Inner product <self|other> of the normalized states."""
        if other.layout != self.layout:
            raise ValueError(f'layout mismatch: {self.layout.labels} vs {other.layout.labels}')
        return complex(np.vdot(self.normalize().amplitudes, other.normalize().amplitudes))

    def fidelity(self, other):
        return abs(self.overlap(other)) ** 2

    def __add__(self, other):
        if other.layout != self.layout:
            raise ValueError(f'layout mismatch: {self.layout.labels} vs {other.layout.labels}')
        return PureState(self.layout, self.amplitudes + other.amplitudes)

    def __mul__(self, scalar):
        return PureState(self.layout, complex(scalar) * self.amplitudes)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Hermitian, unit-trace, positive semidefinite matrix on a layout.

    Attributes:
        layout (SubsystemLayout): Sites the state lives on
        matrix (ndarray): (D, D) complex matrix
        atol (float): Tolerance used to validate the invariants
    """
    layout: SubsystemLayout
    matrix: np.ndarray
    atol: float = field(default=DEFAULT_ATOL, repr=False)

    def __post_init__(self):
        matrix = _frozen_array(self.matrix)
        dim = self.layout.total_dim
        if matrix.shape != (dim, dim):
            raise ValueError(f'density matrix has shape {matrix.shape}, layout needs ({dim}, {dim})')
        if not np.allclose(matrix, matrix.conj().T, rtol=0.0, atol=self.atol):
            raise ValueError('density matrix is not Hermitian')
        trace = np.trace(matrix)
        if abs(trace - 1.0) > self.atol:
            raise ValueError(f'density matrix trace is {trace.real:.3e}, expected 1')
        lowest = float(np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))[0])
        if lowest < -self.atol:
            raise ValueError(f'density matrix has negative eigenvalue {lowest:.3e}')
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def from_pure(cls, state):
        psi = state.normalize().amplitudes
        return cls(state.layout, np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, layout):
        dim = layout.total_dim
        return cls(layout, np.eye(dim) / dim)

    def purity(self):
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def identity(layout):
    return Operator(layout, np.eye(layout.total_dim))


def pauli(site_label, which, layout):
    """
    Embed a single-site Pauli or ladder operator into a layout.

    Args:
        site_label (str): Site the operator acts on
        which (str): One of 'x', 'y', 'z', 'plus', 'minus'
        layout (SubsystemLayout): Full layout

    Returns:
        Operator: identity on every other site
    """
    if which not in _SINGLE_SITE:
        raise ValueError(f'unknown Pauli operator {which!r}; expected one of {sorted(_SINGLE_SITE)}')
    target = layout.index(site_label)
    if layout.dims[target] != 2:
        raise ValueError(f'site {site_label!r} is not a qubit')
    factors = [_SINGLE_SITE[which] if i == target else np.eye(d)
               for i, d in enumerate(layout.dims)]
    return Operator(layout, reduce(np.kron, factors))


def tensor(a, b):
    """Kronecker product of operators on disjoint layouts."""
    overlap = set(a.layout.labels) & set(b.layout.labels)
    if overlap:
        raise ValueError(f'cannot tensor operators sharing sites {sorted(overlap)}')
    layout = SubsystemLayout(a.layout.labels + b.layout.labels, a.layout.dims + b.layout.dims)
    return Operator(layout, np.kron(a.matrix, b.matrix))


def basis_state(bits, layout):
    """Computational basis state, e.g. basis_state('0110', layout)."""
    bits = [int(b) for b in bits]
    if len(bits) != len(layout):
        raise ValueError(f'expected {len(layout)} occupation numbers, got {len(bits)}')
    index = 0
    for bit, dim in zip(bits, layout.dims):
        if not 0 <= bit < dim:
            raise ValueError(f'occupation {bit} out of range for dimension {dim}')
        index = index * dim + bit
    amplitudes = np.zeros(layout.total_dim, dtype=complex)
    amplitudes[index] = 1.0
    return PureState(layout, amplitudes)


def bell_state(which, labels=('A', 'B')):
    """
    Singlet (|01> - |10>)/sqrt2 or triplet (|01> + |10>)/sqrt2 on two qubits.
    """
    sign = {'S': -1.0, 'T': 1.0}.get(which)
    if sign is None:
        raise ValueError(f"Bell state must be 'S' or 'T', got {which!r}")
    amplitudes = np.zeros(4, dtype=complex)
    amplitudes[1] = 1.0 / np.sqrt(2.0)
    amplitudes[2] = sign / np.sqrt(2.0)
    return PureState(SubsystemLayout.qubits(labels), amplitudes)


def projector(state):
    psi = state.normalize().amplitudes
    return Operator(state.layout, np.outer(psi, psi.conj()))


def _site_positions(layout, labels):
    positions = [layout.index(label) for label in labels]
    if len(set(positions)) != len(positions):
        raise ValueError(f'repeated site labels in {labels}')
    return positions


def permute_sites(op, order):
    """
    Reorder the tensor factors of an operator.

    Args:
        op (Operator): Operator to reorder
        order (sequence): Labels of op.layout in their new order

    Returns:
        Operator: Same physical operator on the permuted layout
    """
    perm = _site_positions(op.layout, order)
    if len(perm) != len(op.layout):
        raise ValueError('permutation must list every site exactly once')
    dims = op.layout.dims
    n = len(dims)
    tensor_form = op.matrix.reshape(dims + dims)
    tensor_form = tensor_form.transpose(perm + [n + p for p in perm])
    new_layout = SubsystemLayout(tuple(order), tuple(dims[p] for p in perm))
    return Operator(new_layout, tensor_form.reshape(op.matrix.shape))


def relabel(op, mapping):
    """Rename sites without touching the matrix."""
    labels = tuple(mapping.get(label, label) for label in op.layout.labels)
    return Operator(SubsystemLayout(labels, op.layout.dims), op.matrix)


def partial_trace(rho, keep):
    """
    Reduced density matrix on the sites in ``keep``.

    The kept sites stay in their layout order regardless of the order of
    ``keep``.
    """
    keep = set(keep)
    if not keep:
        raise ValueError('partial trace needs at least one site to keep')
    kept = sorted(_site_positions(rho.layout, keep))
    traced = [i for i in range(len(rho.layout)) if i not in kept]
    dims = rho.layout.dims
    n = len(dims)
    d_keep = int(np.prod([dims[i] for i in kept]))
    d_trace = int(np.prod([dims[i] for i in traced])) if traced else 1
    perm = kept + traced
    tensor_form = rho.matrix.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    tensor_form = tensor_form.reshape(d_keep, d_trace, d_keep, d_trace)
    reduced = np.trace(tensor_form, axis1=1, axis2=3)
    layout = SubsystemLayout(tuple(rho.layout.labels[i] for i in kept),
                             tuple(dims[i] for i in kept))
    return DensityMatrix(layout, reduced, atol=max(rho.atol, DEFAULT_ATOL))


def expectation(op, state):
    """
    Tr(op rho) for a DensityMatrix, <psi|op|psi> (normalized) for a PureState.
    """
    if op.layout != state.layout:
        raise ValueError(f'layout mismatch: {op.layout.labels} vs {state.layout.labels}')
    if isinstance(state, PureState):
        psi = state.normalize().amplitudes
        return complex(np.vdot(psi, op.matrix @ psi))
    return complex(np.trace(op.matrix @ state.matrix))


def trace_distance(rho, sigma):
    if rho.layout != sigma.layout:
        raise ValueError(f'layout mismatch: {rho.layout.labels} vs {sigma.layout.labels}')
    delta = rho.matrix - sigma.matrix
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (delta + delta.conj().T)))))
