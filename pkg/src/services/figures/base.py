"""
Base figure handler interface for figure reproduction.
"""
import logging
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from src.services.sweep_manager import apply_params, evaluate_metrics, run_grid  # noqa: E402

logger = logging.getLogger(__name__)

C1_MAX_LABEL = 'C$_1^{max}$'


@dataclass(frozen=True)
class FigureSettings:
    """
    Resolution and solver settings shared by every figure.

    Attributes:
        points_1d (int): Grid points per curve
        points_2d (int): Grid points per axis of a map
        seed_points (int): Seed-grid points per optimized parameter
        budget (int): Refinement evaluations per optimization
        threads (int): Worker pool size
        tol (float): Steady-state residual tolerance
        eta2_values (tuple): Transmission probabilities for the optimized curves
        time_points (int): Output times per evolution curve
    """
    points_1d: int = 41
    points_2d: int = 31
    seed_points: int = 9
    budget: int = 400
    threads: int = 1
    tol: float = 1e-8
    eta2_values: tuple = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99)
    time_points: int = 81

    def to_dict(self):
        return {
            'points_1d': self.points_1d,
            'points_2d': self.points_2d,
            'seed_points': self.seed_points,
            'budget': self.budget,
            'threads': self.threads,
            'tol': self.tol,
            'eta2_values': list(self.eta2_values),
            'time_points': self.time_points,
        }


def steady_grid(base, points, settings, metric='concurrence'):
    """Steady-state ``metric`` on every params dict, rows in input order."""
    def evaluate(params):
        return evaluate_metrics(apply_params(base, params), (metric,), settings.tol)

    return run_grid(list(points), evaluate, [metric], settings.threads)


class BaseFigure(ABC):
    """
    Abstract base class for all figure handlers.
    """

    figure_id = None

    @abstractmethod
    def compute(self, settings):
        """
        Compute the data behind the figure.

        Args:
            settings (FigureSettings): Resolution and solver settings

        Returns:
            ResultTable: Figure data with its metadata
        """
        pass

    @abstractmethod
    def draw(self, table, fig):
        """
        Draw the figure from its data.

        Args:
            table (ResultTable): Output of compute
            fig (Figure): Empty matplotlib figure to draw on
        """
        pass

    def reproduce(self, out_dir, settings=None, fmt='csv', plot=True):
        """
        Compute the figure and write ``<id>.csv`` (or .json) and ``<id>.svg`` to out_dir.

        Returns:
            tuple: (ResultTable, plot path or None)
        """
        settings = settings or FigureSettings()
        table = self.compute(settings)
        table.metadata['figure'] = self.figure_id
        table.metadata['settings'] = settings.to_dict()
        table.save(out_dir, self.figure_id, fmt)
        if not plot:
            return table, None
        fig = plt.figure(figsize=(6.4, 4.8))
        try:
            self.draw(table, fig)
            path = os.path.join(out_dir, f'{self.figure_id}.svg')
            fig.savefig(path, format='svg', bbox_inches='tight')
        finally:
            plt.close(fig)
        logger.info('Wrote %s', path)
        return table, path
