"""
Figures of the driven pair coupled through a lossy waveguide (1+1 system).
"""
import logging
import math

import numpy as np

from src.models.chain import ChainSpec
from src.models.operators import DensityMatrix, basis_state
from src.services.entanglement import concurrence
from src.services.figures.base import BaseFigure, steady_grid
from src.services.lindblad_engine import evolve
from src.services.model_builder import build_model
from src.services.optimizer import threshold_gamma
from src.services.sweep_manager import log_grid
from src.utils.result_table import ResultTable

logger = logging.getLogger(__name__)

FIG1_ETA2 = (1.0, 0.99, 0.95, 0.9, 0.8)
TARGET_CONCURRENCE = 0.56
T1_US = 100.0


def _pair(eta2):
    return ChainSpec(n=1, eta=math.sqrt(eta2))


class ConcurrenceVsDriveFigure(BaseFigure):
    """Steady-state concurrence against omega/gamma for several transmissions."""

    figure_id = 'fig1c'
    ratio_range = (0.01, 100.0)

    def compute(self, settings):
        ratios = log_grid(*self.ratio_range, settings.points_1d)
        rows = []
        for eta2 in FIG1_ETA2:
            points = [{'omega': r} for r in ratios]
            for row in steady_grid(_pair(eta2), points, settings):
                rows.append({'eta2': eta2, 'omega_over_gamma': row['omega'],
                             'concurrence': row['concurrence'], 'status': row['status'],
                             'error': row['error']})
        return ResultTable.from_rows(rows, metadata={'gamma': 1.0})

    def draw(self, table, fig):
        ax = fig.add_subplot(111)
        frame = table.frame
        for eta2, group in frame.groupby('eta2', sort=False):
            ax.plot(group['omega_over_gamma'], group['concurrence'], label=f'$\\eta^2$ = {eta2:g}')
        ax.set_xscale('log')
        ax.set_xlabel('$\\Omega/\\gamma$')
        ax.set_ylabel('Concurrence')
        ax.set_ylim(0, 1)
        ax.grid(True, alpha=0.3)
        ax.legend(loc='best')


class ConcurrenceVsTimeFigure(BaseFigure):
    """Concurrence against time at each transmission's optimal drive, starting from |00>."""

    figure_id = 'fig1d'
    plateau_multiple = 10.0

    def compute(self, settings):
        sweep = ConcurrenceVsDriveFigure().compute(settings).frame
        rows = []
        for eta2 in FIG1_ETA2:
            if eta2 == 1.0:
                continue
            group = sweep[sweep['eta2'] == eta2]
            best = group.loc[group['concurrence'].idxmax()]
            ratio = float(best['omega_over_gamma'])
            plateau = 1.0 / (1.0 - eta2)
            times = np.concatenate(([0.0], np.geomspace(0.1, self.plateau_multiple * plateau,
                                                        settings.time_points - 1)))
            model = build_model(_pair(eta2).with_param('omega', ratio))
            rho0 = DensityMatrix.from_pure(basis_state('00', model.layout))
            trace = evolve(model, rho0, times)
            for t, value in zip(trace.times, trace.metric(concurrence)):
                rows.append({'eta2': eta2, 'omega_over_gamma': ratio, 'time': t,
                             'concurrence': value, 'plateau_time': plateau})
        return ResultTable.from_rows(rows, metadata={'gamma': 1.0})

    def draw(self, table, fig):
        ax = fig.add_subplot(111)
        for eta2, group in table.frame.groupby('eta2', sort=False):
            line, = ax.plot(group['time'].iloc[1:], group['concurrence'].iloc[1:],
                            label=f'$\\eta^2$ = {eta2:g}')
            ax.axvline(group['plateau_time'].iloc[0], color=line.get_color(), linestyle=':')
        ax.set_xscale('log')
        ax.set_xlabel('$\\gamma t$')
        ax.set_ylabel('Concurrence')
        ax.grid(True, alpha=0.3)
        ax.legend(loc='best')


class IntrinsicLossFigure(BaseFigure):
    """Concurrence over (gamma/2pi, omega/2pi) in MHz with and without intrinsic T1 at eta^2 = 0.9."""

    figure_id = 'figB1'
    eta2 = 0.9
    mhz_range = (0.1, 10.0)

    def compute(self, settings):
        gammas = log_grid(*self.mhz_range, settings.points_2d)
        omegas = log_grid(*self.mhz_range, settings.points_2d)
        rows = []
        for t1 in (T1_US, None):
            base = ChainSpec(n=1, eta=math.sqrt(self.eta2), t1=t1)
            points = [{'gamma': 2 * math.pi * g, 'omega': 2 * math.pi * w} for g in gammas for w in omegas]
            for row in steady_grid(base, points, settings):
                rows.append({'t1_us': np.inf if t1 is None else t1,
                             'gamma_mhz': row['gamma'] / (2 * math.pi),
                             'omega_mhz': row['omega'] / (2 * math.pi),
                             'concurrence': row['concurrence'], 'status': row['status'],
                             'error': row['error']})

        threshold = threshold_gamma(ChainSpec(n=1, eta=math.sqrt(self.eta2), t1=T1_US),
                                    TARGET_CONCURRENCE, (2 * math.pi * 0.05, 2 * math.pi * 20.0),
                                    tol=settings.tol)
        metadata = {
            'eta2': self.eta2,
            'target_concurrence': TARGET_CONCURRENCE,
            'threshold_gamma_mhz': threshold.gamma_mhz,
            'threshold_omega_mhz': threshold.omega / (2 * math.pi),
            'decay_time_ns': 1e3 * threshold.decay_time,
        }
        logger.info('C=%.2f needs gamma/2pi >= %.3f MHz (1/gamma = %.0f ns)',
                    TARGET_CONCURRENCE, threshold.gamma_mhz, 1e3 * threshold.decay_time)
        return ResultTable.from_rows(rows, metadata=metadata)

    def draw(self, table, fig):
        frame = table.frame
        axes = fig.subplots(1, 2, sharey=True)
        for ax, (t1, group) in zip(axes, frame.groupby('t1_us', sort=False)):
            gammas = np.unique(group['gamma_mhz'])
            omegas = np.unique(group['omega_mhz'])
            grid = group.pivot(index='omega_mhz', columns='gamma_mhz', values='concurrence')
            grid = grid.loc[omegas, gammas].to_numpy()
            mesh = ax.pcolormesh(gammas, omegas, grid, shading='auto', vmin=0, vmax=0.6)
            ax.contour(gammas, omegas, grid, levels=[table.metadata['target_concurrence']],
                       colors='k', linewidths=1.0)
            ax.set_xscale('log')
            ax.set_yscale('log')
            ax.set_xlabel('$\\gamma/2\\pi$ (MHz)')
            ax.set_title('$T_1$ = 100 $\\mu$s' if np.isfinite(t1) else 'no intrinsic loss')
            if np.isfinite(t1):
                ax.axvline(table.metadata['threshold_gamma_mhz'], color='w', linestyle='--')
        axes[0].set_ylabel('$\\Omega/2\\pi$ (MHz)')
        fig.colorbar(mesh, ax=list(axes), label='Concurrence')
