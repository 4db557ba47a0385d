"""
Exception hierarchy shared by the library and the command line.
"""


class ChainError(Exception):
    """Base class for every error raised on purpose by this package."""


class ConfigError(ChainError, ValueError):
    """
    Raised when a configuration value or a ChainSpec field is invalid.

    Args:
        message (str): Human readable description
        key (str, optional): Name of the offending configuration key
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class SolverError(ChainError, RuntimeError):
    """Raised when a numerical solve does not produce a trustworthy answer."""


class DegenerateSteadyStateError(SolverError):
    """The Liouvillian null space is not one-dimensional."""


class IntegrationError(SolverError):
    """The adaptive integrator gave up (step-size underflow or similar)."""
