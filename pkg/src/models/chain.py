"""
Parameter records for the driven double chain and the open-system model built from them.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from src.models.operators import Operator
from src.utils.errors import ConfigError

# Collapse operators with a smaller Frobenius norm are treated as absent.
ZERO_OPERATOR_NORM = 1e-14

SWEEPABLE_PARAMS = ('gamma', 'eta', 'eta2', 'omega', 'omega_a', 'omega_b', 'delta',
                    'j', 'j12', 'j23', 't1', 'j12_over_omega')


@dataclass(frozen=True)
class ChainSpec:
    """
    Two mirror-symmetric chains of N qubits whose first sites are coupled to a
    chiral waveguide.

    Attributes:
        n (int): Sites per chain
        gamma (float): Waveguide coupling rate
        eta (float): Transmission amplitude, eta**2 is the transmission probability
        omega_a (float): Rabi drive on A1
        omega_b (float): Rabi drive on B1
        delta (float): Detuning, +delta on A1 and -delta on B1
        j (tuple): N-1 hopping rates J_{j,j+1}, shared by both chains
        t1 (float, optional): Intrinsic relaxation time applied to every qubit
        t1_overrides (tuple): (label, T1) pairs replacing t1 for single qubits
    """
    n: int = 1
    gamma: float = 1.0
    eta: float = 1.0
    omega_a: float = 1.0
    omega_b: float = 1.0
    delta: float = 0.0
    j: tuple = ()
    t1: float = None
    t1_overrides: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, 'j', tuple(float(v) for v in self.j))
        overrides = self.t1_overrides
        if isinstance(overrides, dict):
            overrides = overrides.items()
        object.__setattr__(self, 't1_overrides',
                           tuple(sorted((str(k), float(v)) for k, v in overrides)))
        self.validate()

    def validate(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f'n must be a positive integer, got {self.n}', key='n')
        if not math.isfinite(self.gamma) or self.gamma <= 0:
            raise ConfigError(f'gamma must be positive, got {self.gamma}', key='gamma')
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigError(f'eta must lie in [0, 1], got {self.eta}', key='eta')
        for key in ('omega_a', 'omega_b', 'delta'):
            if not math.isfinite(getattr(self, key)):
                raise ConfigError(f'{key} must be finite', key=key)
        if len(self.j) != self.n - 1:
            raise ConfigError(f'j needs {self.n - 1} hopping rates for n={self.n}, got {len(self.j)}',
                              key='j')
        if any(v < 0 or not math.isfinite(v) for v in self.j):
            raise ConfigError(f'hopping rates must be non-negative, got {self.j}', key='j')
        if self.t1 is not None and not self.t1 > 0:
            raise ConfigError(f't1 must be positive, got {self.t1}', key='t1')
        labels = set(self.labels)
        for label, value in self.t1_overrides:
            if label not in labels:
                raise ConfigError(f'T1 override for unknown qubit {label!r}', key='t1_overrides')
            if not value > 0:
                raise ConfigError(f'T1 override for {label} must be positive', key='t1_overrides')

    @property
    def eta2(self):
        return self.eta ** 2

    @property
    def labels(self):
        return tuple(f'{chain}{site}' for site in range(1, self.n + 1) for chain in 'AB')

    @property
    def outer_labels(self):
        return (f'A{self.n}', f'B{self.n}')

    @property
    def lossless(self):
        return self.eta == 1.0 and self.t1 is None and not self.t1_overrides

    def t1_for(self, label):
        return dict(self.t1_overrides).get(label, self.t1)

    def with_param(self, name, value):
        """
        Copy of the spec with one sweepable parameter changed.

        Names follow the sweep axes: 'omega' sets both drives, 'eta2' sets the
        transmission probability, 'j12_over_omega' sets J12 relative to omega_a.
        """
        value = float(value)
        if name == 'omega':
            return replace(self, omega_a=value, omega_b=value)
        if name == 'eta2':
            if value < 0:
                raise ConfigError(f'eta2 must be non-negative, got {value}', key='eta2')
            return replace(self, eta=math.sqrt(value))
        if name == 'j':
            return replace(self, j=(value,) * (self.n - 1))
        if name in ('j12', 'j23', 'j12_over_omega'):
            bond = 1 if name == 'j23' else 0
            if bond >= self.n - 1:
                raise ConfigError(f'{name} needs n >= {bond + 2}, got n={self.n}', key=name)
            if name == 'j12_over_omega':
                value = value * self.omega_a
            hops = list(self.j)
            hops[bond] = value
            return replace(self, j=tuple(hops))
        if name in ('gamma', 'eta', 'omega_a', 'omega_b', 'delta', 't1'):
            return replace(self, **{name: value})
        raise ConfigError(f'unknown sweep parameter {name!r}; expected one of {SWEEPABLE_PARAMS}',
                          key=name)

    def scaled(self, factor):
        """Multiply every rate by ``factor`` (relaxation times divide)."""
        factor = float(factor)
        return replace(
            self,
            gamma=self.gamma * factor,
            omega_a=self.omega_a * factor,
            omega_b=self.omega_b * factor,
            delta=self.delta * factor,
            j=tuple(v * factor for v in self.j),
            t1=None if self.t1 is None else self.t1 / factor,
            t1_overrides=tuple((k, v / factor) for k, v in self.t1_overrides),
        )

    def to_dict(self):
        return {
            'n': self.n,
            'gamma': self.gamma,
            'eta': self.eta,
            'omega_a': self.omega_a,
            'omega_b': self.omega_b,
            'delta': self.delta,
            'j': list(self.j),
            't1': self.t1,
            't1_overrides': dict(self.t1_overrides),
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data['j'] = tuple(data.get('j', ()))
        data['t1_overrides'] = data.get('t1_overrides') or ()
        return cls(**data)


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """
    Hamiltonian plus collapse operators; the dissipator is sum_k D[c_k] with
    every rate absorbed into the operator amplitudes.

    Collapse operators that are identically zero are dropped on construction.
    """
    layout: object
    H: Operator
    collapse_ops: tuple = ()

    def __post_init__(self):
        if self.H.layout != self.layout:
            raise ValueError('Hamiltonian layout does not match the model layout')
        scale = max(1.0, float(np.max(np.abs(self.H.matrix))))
        if not self.H.is_hermitian(tol=1e-12 * scale):
            raise ValueError('Hamiltonian is not Hermitian')
        ops = []
        for op in self.collapse_ops:
            if op.layout != self.layout:
                raise ValueError('collapse operator layout does not match the model layout')
            if op.norm() > ZERO_OPERATOR_NORM:
                ops.append(op)
        object.__setattr__(self, 'collapse_ops', tuple(ops))

    @property
    def dim(self):
        return self.layout.total_dim

    def allclose(self, other, atol=1e-12):
        """Operator-by-operator equality (collapse operators compared in order)."""
        if other.layout != self.layout or len(other.collapse_ops) != len(self.collapse_ops):
            return False
        if not self.H.allclose(other.H, atol=atol):
            return False
        return all(a.allclose(b, atol=atol) for a, b in zip(self.collapse_ops, other.collapse_ops))
