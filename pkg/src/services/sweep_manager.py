"""
Sweep Manager for running steady-state solves over parameter grids.
"""
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from threading import Lock

import numpy as np

from src.models.chain import ChainSpec, SWEEPABLE_PARAMS
from src.models.operators import partial_trace
from src.services.entanglement import bell_fidelity, pair_concurrence, purity
from src.services.lindblad_engine import steady_state
from src.services.model_builder import build_model
from src.utils.errors import ConfigError
from src.utils.result_table import ResultTable

logger = logging.getLogger(__name__)

METRICS = ('concurrence', 'outer_pair_concurrence', 'purity', 'gap', 'fidelity')


def log_grid(start, stop, count):
    if start <= 0 or stop <= 0:
        raise ConfigError(f'log grid bounds must be positive, got {start}, {stop}', key='axis')
    return tuple(np.geomspace(start, stop, int(count)))


def lin_grid(start, stop, count):
    return tuple(np.linspace(start, stop, int(count)))


@dataclass(frozen=True)
class Axis:
    """
    One swept parameter.

    Attributes:
        name (str): A ChainSpec.with_param name
        values (tuple): Strictly monotone grid
    """
    name: str
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, 'values', tuple(float(v) for v in self.values))
        if self.name not in SWEEPABLE_PARAMS:
            raise ConfigError(f'cannot sweep {self.name!r}; expected one of {SWEEPABLE_PARAMS}', key='axis')
        if not self.values:
            raise ConfigError(f'axis {self.name} has an empty grid', key='axis')
        steps = np.diff(self.values)
        if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ConfigError(f'axis {self.name} grid is not strictly monotone', key='axis')

    @classmethod
    def parse(cls, text):
        """
        Parse ``name=spacing:start:stop:count``, e.g. ``omega=log:0.1:10:41``.
        """
        try:
            name, grid = text.split('=', 1)
            spacing, start, stop, count = grid.split(':')
            start, stop, count = float(start), float(stop), int(count)
        except ValueError:
            raise ConfigError(f'bad axis {text!r}; expected name=spacing:start:stop:count', key='axis') from None
        if count < 1:
            raise ConfigError(f'axis {name} needs at least one point', key='axis')
        if spacing == 'log':
            return cls(name.strip(), log_grid(start, stop, count))
        if spacing == 'lin':
            return cls(name.strip(), lin_grid(start, stop, count))
        raise ConfigError(f"axis spacing must be 'log' or 'lin', got {spacing!r}", key='axis')


@dataclass(frozen=True)
class SweepSpec:
    base: ChainSpec
    axes: tuple
    metrics: tuple = ('concurrence',)
    tol: float = 1e-8
    budget: int = 400
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'axes', tuple(self.axes))
        object.__setattr__(self, 'metrics', tuple(self.metrics))
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError(f'a sweep needs one or two axes, got {len(self.axes)}', key='axis')
        if len({axis.name for axis in self.axes}) != len(self.axes):
            raise ConfigError('sweep axes must be distinct', key='axis')
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown or not self.metrics:
            raise ConfigError(f'unknown metrics {unknown}; expected a subset of {METRICS}', key='metric')
        if 'outer_pair_concurrence' in self.metrics and self.base.n < 2:
            raise ConfigError('outer_pair_concurrence needs n >= 2', key='metric')
        if self.size > self.budget:
            raise ConfigError(f'sweep has {self.size} points, budget is {self.budget}', key='budget')

    @property
    def size(self):
        return math.prod(len(axis.values) for axis in self.axes)

    def points(self):
        """Grid points in row-major order (last axis fastest)."""
        names = [axis.name for axis in self.axes]
        for values in itertools.product(*(axis.values for axis in self.axes)):
            yield dict(zip(names, values))

    def to_dict(self):
        return {
            'base': self.base.to_dict(),
            'axes': {axis.name: list(axis.values) for axis in self.axes},
            'metrics': list(self.metrics),
            'tol': self.tol,
        }


def apply_params(base, params):
    """Copy of base with every swept parameter set; ratios to the drive are applied last."""
    spec = base
    for name, value in sorted(params.items(), key=lambda item: item[0] == 'j12_over_omega'):
        spec = spec.with_param(name, value)
    return spec


def evaluate_metrics(spec, metrics, tol=1e-8):
    """
    Solve for the steady state of one chain and compute the requested metrics.

    Returns:
        dict: metric name -> value, plus the solver residual
    """
    model = build_model(spec)
    result = steady_state(model, tol=tol, compute_gap='gap' in metrics)
    rho = result.rho
    values = {}
    for metric in metrics:
        if metric == 'concurrence':
            values[metric] = pair_concurrence(rho, 1)
        elif metric == 'outer_pair_concurrence':
            values[metric] = pair_concurrence(rho, spec.n)
        elif metric == 'purity':
            values[metric] = purity(rho)
        elif metric == 'gap':
            values[metric] = result.gap
        elif metric == 'fidelity':
            outer = partial_trace(rho, set(spec.outer_labels))
            values[metric] = bell_fidelity(outer, 'S' if spec.n % 2 == 1 else 'T')
    values['residual'] = result.residual
    return values


class SweepManager:
    """
    Worker pool for independent grid-point evaluations, tracking every task.
    """

    def __init__(self, threads=1):
        """
        Args:
            threads (int): Maximum number of concurrent evaluations
        """
        self.threads = max(1, int(threads))
        self.tasks = {}
        self.tasks_lock = Lock()

    def create_task(self, task_id, params):
        with self.tasks_lock:
            self.tasks[task_id] = {
                'id': task_id,
                'params': dict(params),
                'status': 'created',
                'created_at': datetime.now().isoformat(),
                'started_at': None,
                'completed_at': None,
                'result': None,
                'error': None,
            }
        return task_id

    def _run_task(self, task_id, evaluate):
        with self.tasks_lock:
            task = self.tasks[task_id]
            task['status'] = 'running'
            task['started_at'] = datetime.now().isoformat()
            params = task['params']
        try:
            result = evaluate(params)
            with self.tasks_lock:
                task['status'] = 'completed'
                task['result'] = result
        except Exception as e:
            logger.warning('Grid point %s failed: %s', params, e)
            with self.tasks_lock:
                task['status'] = 'failed'
                task['error'] = f'{type(e).__name__}: {e}'
        finally:
            with self.tasks_lock:
                task['completed_at'] = datetime.now().isoformat()

    def run(self, evaluate):
        """
        Evaluate every created task; failures are recorded on the task, never raised.

        Args:
            evaluate (callable): params dict -> result dict

        Returns:
            list: Tasks ordered by task id
        """
        pending = [task_id for task_id, task in self.tasks.items() if task['status'] == 'created']
        if self.threads == 1:
            for task_id in pending:
                self._run_task(task_id, evaluate)
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                list(pool.map(lambda task_id: self._run_task(task_id, evaluate), pending))
        return self.get_all_tasks()

    def get_task(self, task_id):
        with self.tasks_lock:
            return self.tasks.get(task_id)

    def get_all_tasks(self):
        with self.tasks_lock:
            return [self.tasks[k] for k in sorted(self.tasks)]

    def counts(self):
        with self.tasks_lock:
            statuses = [task['status'] for task in self.tasks.values()]
        return {status: statuses.count(status) for status in set(statuses)}


def run_grid(points, evaluate, columns, threads=1):
    """
    Evaluate ``evaluate(params)`` on every params dict and collect rows in input order.

    Failed points get NaN in every result column, status 'failed' and the error text.
    """
    manager = SweepManager(threads)
    for index, params in enumerate(points):
        manager.create_task(index, params)
    rows = []
    for task in manager.run(evaluate):
        row = dict(task['params'])
        result = task['result'] or {}
        for name in columns:
            row[name] = result.get(name, np.nan)
        row['status'] = task['status']
        row['error'] = task['error'] or ''
        rows.append(row)
    counts = manager.counts()
    if counts.get('failed'):
        logger.warning('%d of %d grid points failed', counts['failed'], len(rows))
    return rows


def sweep(spec):
    """
    Steady-state metrics on every grid point of a SweepSpec.

    Args:
        spec (SweepSpec): Base chain, axes and metrics

    Returns:
        ResultTable: One row per grid point in grid order
    """
    def evaluate(params):
        return evaluate_metrics(apply_params(spec.base, params), spec.metrics, spec.tol)

    columns = list(spec.metrics) + ['residual']
    rows = run_grid(spec.points(), evaluate, columns, spec.threads)
    logger.info('Swept %d points over %s', len(rows), [axis.name for axis in spec.axes])
    frame_columns = [axis.name for axis in spec.axes] + columns + ['status', 'error']
    return ResultTable.from_rows(rows, frame_columns, metadata={'sweep': spec.to_dict()})
