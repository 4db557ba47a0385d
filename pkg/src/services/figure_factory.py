"""
Figure factory for creating the appropriate figure handler.
"""
from .figures.optimized import OptimizedConcurrenceFigure, OptimizedParametersFigure
from .figures.storage_pair import MaxConcurrenceFigure, StorageMapFigure
from .figures.two_qubit import ConcurrenceVsDriveFigure, ConcurrenceVsTimeFigure, IntrinsicLossFigure

FIGURE_IDS = ('fig1c', 'fig1d', 'fig2a', 'fig2b', 'fig3a', 'fig3b', 'figB1')


class FigureFactory:
    """
    Factory class for creating figure handlers.
    """

    @staticmethod
    def create_handler(figure_id):
        """
        Create and return the handler for a figure.

        Args:
            figure_id (str): One of FIGURE_IDS

        Returns:
            BaseFigure: Handler for the figure

        Raises:
            ValueError: for an unknown figure id
        """
        if figure_id == 'fig1c':
            return ConcurrenceVsDriveFigure()
        elif figure_id == 'fig1d':
            return ConcurrenceVsTimeFigure()
        elif figure_id == 'fig2a':
            return StorageMapFigure()
        elif figure_id == 'fig2b':
            return MaxConcurrenceFigure()
        elif figure_id == 'fig3a':
            return OptimizedConcurrenceFigure()
        elif figure_id == 'fig3b':
            return OptimizedParametersFigure()
        elif figure_id == 'figB1':
            return IntrinsicLossFigure()
        raise ValueError(f'unknown figure {figure_id!r}; expected one of {FIGURE_IDS}')


def reproduce_figure(figure_id, out_dir, settings=None, fmt='csv', plot=True):
    """
    Compute a figure and write its table (and SVG plot) to out_dir.

    Returns:
        tuple: (ResultTable, plot path or None)
    """
    return FigureFactory.create_handler(figure_id).reproduce(out_dir, settings, fmt, plot)
