"""
Steady-state concurrence optimization over drives and hopping.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from src.models.chain import ChainSpec
from src.services.sweep_manager import apply_params, evaluate_metrics, log_grid, run_grid
from src.utils.errors import ConfigError, SolverError
from src.utils.result_table import ResultTable

logger = logging.getLogger(__name__)

FREE_PARAMS = ('omega', 'omega_a', 'omega_b', 'j12')

# Bounds in units of gamma
DEFAULT_BOUNDS = {
    'omega': (0.01, 20.0),
    'omega_a': (0.01, 20.0),
    'omega_b': (0.01, 20.0),
    'j12': (0.001, 10.0),
}


@dataclass(frozen=True)
class OptimizeSpec:
    """
    Attributes:
        base (ChainSpec): Fixed parameters
        free (tuple): Parameters to optimize, subset of FREE_PARAMS
        bounds (dict): name -> (low, high) absolute bounds, defaults scale with gamma
        seed_points (int): Log-grid points per free parameter for the seed scan
        budget (int): Maximum objective evaluations of the refinement
        tol (float): Steady-state residual tolerance
        threads (int): Workers for the seed scan
    """
    base: ChainSpec
    free: tuple = ('omega',)
    bounds: dict = field(default=None)
    seed_points: int = 9
    budget: int = 400
    tol: float = 1e-8
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'free', tuple(self.free))
        if not self.free:
            raise ConfigError('optimization needs at least one free parameter', key='free')
        unknown = [name for name in self.free if name not in FREE_PARAMS]
        if unknown:
            raise ConfigError(f'cannot optimize {unknown}; expected a subset of {FREE_PARAMS}', key='free')
        if 'omega' in self.free and ({'omega_a', 'omega_b'} & set(self.free)):
            raise ConfigError("'omega' sets both drives and cannot be combined with omega_a/omega_b",
                              key='free')
        if 'j12' in self.free and self.base.n < 2:
            raise ConfigError('j12 is only free for n >= 2', key='free')
        bounds = {name: tuple(v * self.base.gamma for v in DEFAULT_BOUNDS[name]) for name in self.free}
        bounds.update({k: tuple(v) for k, v in (self.bounds or {}).items() if k in self.free})
        for name, (low, high) in bounds.items():
            if not (0 < low < high and math.isfinite(high)):
                raise ConfigError(f'bounds for {name} must be positive, finite and increasing', key='bounds')
        object.__setattr__(self, 'bounds', bounds)
        if self.seed_points < 2:
            raise ConfigError('seed grid needs at least two points per axis', key='seed_points')

    @property
    def objective(self):
        return 'outer_pair_concurrence' if self.base.n >= 2 else 'concurrence'

    def to_dict(self):
        return {
            'base': self.base.to_dict(),
            'free': list(self.free),
            'bounds': {k: list(v) for k, v in self.bounds.items()},
            'seed_points': self.seed_points,
            'budget': self.budget,
            'tol': self.tol,
            'objective': self.objective,
        }


@dataclass(frozen=True, eq=False)
class OptimizeResult:
    best_params: dict
    best_value: float
    table: ResultTable
    budget_exhausted: bool = False

    @property
    def evaluations(self):
        return len(self.table)


def _objective_value(base, params, objective, tol):
    return evaluate_metrics(apply_params(base, params), (objective,), tol)[objective]


def optimize(spec):
    """
    Maximize the steady-state concurrence over the free parameters.

    A coarse log-grid scan seeds a Nelder-Mead refinement in log-parameter
    space; points outside the bounds are clipped onto them. The best value over
    every evaluation is returned, so it never falls below the best seed.

    Args:
        spec (OptimizeSpec): What to optimize

    Returns:
        OptimizeResult: Best parameters, best value, and a table of all evaluations
    """
    objective = spec.objective
    names = list(spec.free)
    low = np.log([spec.bounds[name][0] for name in names])
    high = np.log([spec.bounds[name][1] for name in names])

    grids = [log_grid(*spec.bounds[name], spec.seed_points) for name in names]
    seeds = [dict(zip(names, values)) for values in itertools.product(*grids)]
    rows = run_grid(seeds, lambda params: {objective: _objective_value(spec.base, params, objective, spec.tol)},
                    [objective], spec.threads)
    for row in rows:
        row['stage'] = 'seed'

    values = np.array([row[objective] for row in rows], dtype=float)
    if np.all(np.isnan(values)):
        raise SolverError(f'every seed point failed for {names}; first error: {rows[0]["error"]}')
    best = rows[int(np.nanargmax(values))]
    x0 = np.log([best[name] for name in names])

    def negative(log_x):
        params = dict(zip(names, np.exp(np.clip(log_x, low, high))))
        row = dict(params, stage='refine', status='completed', error='')
        try:
            row[objective] = _objective_value(spec.base, params, objective, spec.tol)
        except (SolverError, ValueError) as e:
            row.update({objective: np.nan, 'status': 'failed', 'error': f'{type(e).__name__}: {e}'})
        rows.append(row)
        return np.inf if np.isnan(row[objective]) else -row[objective]

    result = minimize(negative, x0, method='Nelder-Mead',
                      options={'maxfev': spec.budget, 'xatol': 1e-4, 'fatol': 1e-10})
    exhausted = result.nfev >= spec.budget and not result.success
    if exhausted:
        logger.warning('Optimizer budget of %d evaluations exhausted; returning best so far', spec.budget)

    columns = names + [objective, 'stage', 'status', 'error']
    table = ResultTable.from_rows(rows, columns, metadata={'optimize': spec.to_dict()})
    values = table.column(objective).astype(float)
    best = table.frame.iloc[int(np.nanargmax(values))]
    best_params = {name: float(best[name]) for name in names}
    logger.info('Best %s = %.6f at %s', objective, best[objective], best_params)
    return OptimizeResult(best_params, float(best[objective]), table, exhausted)


@dataclass(frozen=True)
class ThresholdResult:
    """
    Attributes:
        gamma (float): Minimal waveguide coupling reaching the target
        omega (float): Optimal drive at that coupling
        concurrence (float): Concurrence reached there
    """
    gamma: float
    omega: float
    concurrence: float

    @property
    def gamma_mhz(self):
        return self.gamma / (2.0 * math.pi)

    @property
    def decay_time(self):
        return 1.0 / self.gamma


def best_symmetric_drive(spec, tol=1e-8, ratio_bounds=(0.1, 10.0)):
    """Maximum 1+1 concurrence over symmetric drives omega = x gamma; returns (omega, concurrence)."""
    def negative(log_ratio):
        omega = math.exp(log_ratio) * spec.gamma
        return -_objective_value(spec, {'omega': omega}, 'concurrence', tol)

    result = minimize_scalar(negative, bounds=tuple(math.log(b) for b in ratio_bounds), method='bounded',
                             options={'xatol': 1e-5})
    return math.exp(result.x) * spec.gamma, -float(result.fun)


def threshold_gamma(base, target, gamma_bounds, tol=1e-8):
    """
    Smallest gamma for which the best symmetric drive reaches ``target``
    concurrence, at fixed intrinsic relaxation.

    Args:
        base (ChainSpec): Spec carrying eta and t1; gamma and drives are overwritten
        target (float): Concurrence to reach
        gamma_bounds (tuple): (low, high) search bracket for gamma

    Returns:
        ThresholdResult: Threshold coupling and the optimum there

    Raises:
        SolverError: if the bracket does not straddle the target
    """
    def excess(log_gamma):
        return best_symmetric_drive(base.with_param('gamma', math.exp(log_gamma)), tol)[1] - target

    low, high = (math.log(g) for g in gamma_bounds)
    f_low, f_high = excess(low), excess(high)
    if f_low * f_high > 0:
        raise SolverError(f'target concurrence {target} is not crossed for gamma in {gamma_bounds} '
                          f'(excess {f_low:.3g} .. {f_high:.3g})')
    log_gamma = brentq(excess, low, high, xtol=1e-6)
    gamma = math.exp(log_gamma)
    omega, value = best_symmetric_drive(base.with_param('gamma', gamma), tol)
    logger.info('Threshold gamma %.4g reaches C=%.4f at omega %.4g', gamma, value, omega)
    return ThresholdResult(gamma, omega, value)
