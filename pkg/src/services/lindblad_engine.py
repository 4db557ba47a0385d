"""
Liouvillian construction, steady states, time evolution and spectral gaps.

Density matrices are vectorized by column stacking, vec(A X B) = (B^T kron A) vec(X).
"""
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from src.models.operators import DensityMatrix, PureState, DEFAULT_ATOL
from src.utils.errors import DegenerateSteadyStateError, IntegrationError, SolverError

logger = logging.getLogger(__name__)

MAX_DIM = 64
UNIQUENESS_RATIO = 1e3
TRACE_DRIFT_TOL = 1e-8
ZERO_MODE_TOL = 1e-10


def vec(matrix):
    return np.asarray(matrix).reshape(-1, order='F')


def unvec(vector, dim):
    return np.asarray(vector).reshape((dim, dim), order='F')


def _left(op):
    return np.kron(np.eye(op.shape[0]), op)


def _right(op):
    return np.kron(op.T, np.eye(op.shape[0]))


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """
    Superoperator M with vec(d rho/dt) = M vec(rho).

    Attributes:
        model (LindbladModel): Model the generator was built from
        matrix (ndarray): (D^2, D^2) complex matrix
    """
    model: object
    matrix: np.ndarray

    @property
    def dim(self):
        return self.model.dim

    def apply(self, rho):
        return unvec(self.matrix @ vec(rho), self.dim)


@dataclass(frozen=True, eq=False)
class SteadyState:
    rho: DensityMatrix
    residual: float
    gap: float = None


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    """
    States on an increasing time grid.

    Attributes:
        times (ndarray): Output times
        states (tuple): DensityMatrix per output time
        max_trace_drift (float): Largest |Tr rho - 1| before renormalization
    """
    times: np.ndarray
    states: tuple
    max_trace_drift: float = field(default=0.0)

    def metric(self, fn):
        """Evaluate ``fn(rho)`` at every output time."""
        return np.array([fn(rho) for rho in self.states], dtype=float)

    def __len__(self):
        return len(self.states)


def build_liouvillian(model, max_dim=MAX_DIM):
    """
    Dense generator of the master equation.

    M = -i(I kron H - H^T kron I)
        + sum_k [conj(c_k) kron c_k - (I kron c_k^dag c_k + (c_k^dag c_k)^T kron I) / 2]

    Raises:
        ValueError: if the Hilbert space dimension exceeds ``max_dim``
    """
    dim = model.dim
    if dim > max_dim:
        raise ValueError(f'Hilbert space dimension {dim} exceeds the dense limit {max_dim}')
    H = model.H.matrix
    matrix = -1j * (_left(H) - _right(H))
    for op in model.collapse_ops:
        c = op.matrix
        cdc = c.conj().T @ c
        matrix = matrix + np.kron(c.conj(), c) - 0.5 * (_left(cdc) + _right(cdc))
    return Liouvillian(model, matrix)


def lindblad_rhs(model, rho):
    """-i[H, rho] + sum_k D[c_k] rho evaluated directly on a (D, D) matrix."""
    H = model.H.matrix
    out = -1j * (H @ rho - rho @ H)
    for op in model.collapse_ops:
        c = op.matrix
        cd = c.conj().T
        cdc = cd @ c
        out = out + c @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc)
    return out


def liouvillian_residual(model, state):
    """
    Frobenius norm of the master-equation right-hand side, equal to ||M vec(rho)||.

    Args:
        model (LindbladModel): Model to test against
        state (DensityMatrix | PureState): Candidate stationary state

    Returns:
        float: Residual norm
    """
    if state.layout != model.layout:
        raise ValueError(f'layout mismatch: {state.layout.labels} vs {model.layout.labels}')
    if isinstance(state, PureState):
        psi = state.normalize().amplitudes
        rho = np.outer(psi, psi.conj())
    else:
        rho = state.matrix
    return float(np.linalg.norm(lindblad_rhs(model, rho)))


def _null_vector(matrix):
    _, _, vh = scipy.linalg.svd(matrix)
    return vh[-1].conj()


def steady_state(model, tol=1e-8, compute_gap=False, liouvillian=None, check_unique=True):
    """
    Unique stationary state of the model.

    The first row of the scaled Liouvillian is replaced by the trace
    constraint and the square system is solved by LU decomposition. An
    ill-conditioned solve falls back to the SVD null vector.

    Args:
        model (LindbladModel): Model with at least one collapse operator
        tol (float): Largest accepted residual ||M vec(rho)||
        compute_gap (bool): Also compute the spectral gap
        liouvillian (Liouvillian, optional): Prebuilt generator
        check_unique (bool): Require a one-dimensional null space

    Returns:
        SteadyState: State, residual and optional gap

    Raises:
        DegenerateSteadyStateError: if the null space is not one-dimensional
        SolverError: if the residual exceeds tol
    """
    if not model.collapse_ops:
        raise DegenerateSteadyStateError('model has no collapse operators; steady state is not unique')
    liouvillian = liouvillian or build_liouvillian(model)
    dim = model.dim
    scale = float(np.linalg.norm(liouvillian.matrix))
    scaled = liouvillian.matrix / scale

    if check_unique:
        singular = scipy.linalg.svdvals(scaled)
        if singular[-2] <= UNIQUENESS_RATIO * singular[-1]:
            raise DegenerateSteadyStateError(
                f'steady state is not unique: smallest singular values {singular[-1]:.3e} '
                f'and {singular[-2]:.3e}')

    system = scaled.copy()
    system[0, :] = vec(np.eye(dim))
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[0] = 1.0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('error', scipy.linalg.LinAlgWarning)
            solution = scipy.linalg.solve(system, rhs)
    except (scipy.linalg.LinAlgWarning, scipy.linalg.LinAlgError) as e:
        logger.info('LU steady-state solve ill-conditioned (%s); using SVD null vector', e)
        solution = _null_vector(scaled)

    rho = unvec(solution, dim)
    rho = 0.5 * (rho + rho.conj().T)
    trace = np.real(np.trace(rho))
    if abs(trace) < np.finfo(float).eps:
        raise SolverError('steady-state candidate has zero trace')
    rho = rho / trace

    residual = float(np.linalg.norm(liouvillian.matrix @ vec(rho)))
    if residual > tol:
        raise SolverError(f'steady-state residual {residual:.3e} exceeds tolerance {tol:.1e}')
    gap = spectral_gap(model, liouvillian) if compute_gap else None
    return SteadyState(DensityMatrix(model.layout, rho, atol=max(DEFAULT_ATOL, tol)), residual, gap)


def evolve(model, rho0, t_grid, rtol=1e-8, atol=1e-10, liouvillian=None):
    """
    Integrate the master equation with an adaptive 4(5) Runge-Kutta scheme.

    Args:
        model (LindbladModel): Generator
        rho0 (DensityMatrix): Initial state
        t_grid (array-like): Strictly increasing output times, t_grid[0] is the start

    Returns:
        EvolutionTrace: Renormalized states on t_grid

    Raises:
        IntegrationError: if the integrator fails
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError('t_grid must be a nonempty 1-d sequence')
    if np.any(np.diff(times) <= 0):
        raise ValueError('t_grid must be strictly increasing')
    if rho0.layout != model.layout:
        raise ValueError(f'layout mismatch: {rho0.layout.labels} vs {model.layout.labels}')
    if times.size == 1:
        return EvolutionTrace(times, (rho0,))

    dim = model.dim
    matrix = (liouvillian or build_liouvillian(model)).matrix
    solution = solve_ivp(lambda _t, y: matrix @ y, (times[0], times[-1]), vec(rho0.matrix).astype(complex),
                         method='RK45', t_eval=times, rtol=rtol, atol=atol)
    if not solution.success:
        raise IntegrationError(f'integration failed: {solution.message}')

    states = []
    max_drift = 0.0
    for column in solution.y.T:
        rho = unvec(column, dim)
        rho = 0.5 * (rho + rho.conj().T)
        trace = float(np.real(np.trace(rho)))
        max_drift = max(max_drift, abs(trace - 1.0))
        states.append(DensityMatrix(model.layout, rho / trace, atol=TRACE_DRIFT_TOL))
    if max_drift > TRACE_DRIFT_TOL:
        logger.warning('Trace drifted by %.2e during evolution; states were renormalized', max_drift)
    return EvolutionTrace(solution.t, tuple(states), max_drift)


def spectral_gap(model, liouvillian=None):
    """Smallest decay rate |Re lambda| over the Liouvillian eigenvalues other than the stationary one."""
    matrix = (liouvillian or build_liouvillian(model)).matrix
    try:
        eigenvalues = scipy.linalg.eigvals(matrix)
    except scipy.linalg.LinAlgError as e:
        raise SolverError(f'Liouvillian eigendecomposition failed: {e}') from e
    order = np.argsort(np.abs(eigenvalues))
    rest = eigenvalues[order[1:]]
    if rest.size == 0:
        raise SolverError('a one-dimensional Hilbert space has no relaxing modes')
    gap = float(np.min(np.abs(rest.real)))
    # a second non-decaying mode means no unique attracting steady state
    if gap <= ZERO_MODE_TOL * max(1.0, float(np.max(np.abs(eigenvalues)))):
        raise DegenerateSteadyStateError(f'spectral gap {gap:.3e} is zero within tolerance')
    return gap


def relaxation_time(model, liouvillian=None):
    return 1.0 / spectral_gap(model, liouvillian)
