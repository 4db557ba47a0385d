"""
Figures of the storage pair in the 2+2 chain.
"""
import logging
import math

import numpy as np
from matplotlib.colors import TwoSlopeNorm
from scipy.optimize import minimize_scalar

from src.models.chain import ChainSpec
from src.services.effective_model import effective_model
from src.services.entanglement import concurrence
from src.services.figures.base import BaseFigure, C1_MAX_LABEL, steady_grid
from src.services.lindblad_engine import steady_state
from src.services.optimizer import OptimizeSpec, best_symmetric_drive, optimize
from src.services.sweep_manager import log_grid
from src.utils.result_table import ResultTable

logger = logging.getLogger(__name__)


def weak_limit_concurrence(eta, ratio_bounds=(0.05, 20.0), tol=1e-8):
    """
    Best storage-pair concurrence of the effective model over J12/omega.

    The effective steady state depends on omega and J12 only through
    omega/(2 J12), so it is evaluated at omega = gamma = 1.

    Returns:
        tuple: (J12/omega, concurrence)
    """
    def negative(log_ratio):
        effective = effective_model(1.0, 1.0, math.exp(log_ratio), eta)
        return -concurrence(steady_state(effective.model, tol=tol).rho)

    result = minimize_scalar(negative, bounds=tuple(math.log(b) for b in ratio_bounds), method='bounded',
                             options={'xatol': 1e-5})
    return math.exp(result.x), -float(result.fun)


class StorageMapFigure(BaseFigure):
    """Outer-pair concurrence over (omega/gamma, J12/omega) at eta^2 = 0.9, coloured about C1max."""

    figure_id = 'fig2a'
    eta2 = 0.9
    omega_range = (1e-3, 10.0)
    ratio_range = (0.1, 10.0)

    def compute(self, settings):
        eta = math.sqrt(self.eta2)
        omegas = log_grid(*self.omega_range, settings.points_2d)
        ratios = log_grid(*self.ratio_range, settings.points_2d)
        points = [{'omega': w, 'j12_over_omega': r} for w in omegas for r in ratios]
        rows = steady_grid(ChainSpec(n=2, eta=eta, j=(1.0,)), points, settings, 'outer_pair_concurrence')
        for row in rows:
            row['omega_over_gamma'] = row.pop('omega')
        _, c1_max = best_symmetric_drive(ChainSpec(n=1, eta=eta), settings.tol)
        columns = ['omega_over_gamma', 'j12_over_omega', 'outer_pair_concurrence', 'status', 'error']
        return ResultTable.from_rows(rows, columns, metadata={'eta2': self.eta2, 'c1_max': c1_max})

    def draw(self, table, fig):
        ax = fig.add_subplot(111)
        frame = table.frame
        omegas = np.unique(frame['omega_over_gamma'])
        ratios = np.unique(frame['j12_over_omega'])
        grid = frame.pivot(index='j12_over_omega', columns='omega_over_gamma',
                           values='outer_pair_concurrence').loc[ratios, omegas].to_numpy()
        c1_max = table.metadata['c1_max']
        top = max(float(np.nanmax(grid)), c1_max + 1e-3)
        norm = TwoSlopeNorm(vmin=0.0, vcenter=c1_max, vmax=top)
        mesh = ax.pcolormesh(omegas, ratios, grid, shading='auto', cmap='RdBu_r', norm=norm)
        ax.contour(omegas, ratios, grid, levels=[c1_max], colors='k', linewidths=0.8)
        ax.set_xscale('log')
        ax.set_yscale('log')
        ax.set_xlabel('$\\Omega/\\gamma$')
        ax.set_ylabel('$J_{12}/\\Omega$')
        fig.colorbar(mesh, ax=ax, label=f'Concurrence (centred on {C1_MAX_LABEL})')


class MaxConcurrenceFigure(BaseFigure):
    """Best concurrence against eta^2: symmetric 1+1, weak-limit 2+2 and symmetric 2+2."""

    figure_id = 'fig2b'

    def compute(self, settings):
        rows = []
        for eta2 in settings.eta2_values:
            eta = math.sqrt(eta2)
            _, c_1p1 = best_symmetric_drive(ChainSpec(n=1, eta=eta), settings.tol)
            _, c_weak = weak_limit_concurrence(eta, tol=settings.tol)
            result = optimize(OptimizeSpec(ChainSpec(n=2, eta=eta, j=(1.0,)), free=('omega', 'j12'),
                                           seed_points=settings.seed_points, budget=settings.budget,
                                           tol=settings.tol, threads=settings.threads))
            rows.append({'eta2': eta2, 'c_1p1': c_1p1, 'c_2p2_weak': c_weak, 'c_2p2': result.best_value,
                         'budget_exhausted': result.budget_exhausted})
            logger.info('eta2=%g: 1+1 %.4f, weak 2+2 %.4f, 2+2 %.4f', eta2, c_1p1, c_weak, result.best_value)
        return ResultTable.from_rows(rows)

    def draw(self, table, fig):
        ax = fig.add_subplot(111)
        frame = table.frame
        ax.plot(frame['eta2'], frame['c_1p1'], 'o-', label='1+1')
        ax.plot(frame['eta2'], frame['c_2p2_weak'], 's--', label='2+2 weak drive')
        ax.plot(frame['eta2'], frame['c_2p2'], '^-', label='2+2')
        ax.set_xlabel('$\\eta^2$')
        ax.set_ylabel('Maximal concurrence')
        ax.grid(True, alpha=0.3)
        ax.legend(loc='best')
