"""Exception hierarchy shared by every module."""


class DistOptError(Exception):
    """Base class for simulator errors."""


class ConfigurationError(DistOptError, ValueError):
    """Invalid parameters, shapes or option combinations."""


class TopologyError(DistOptError):
    """A graph or schedule violates connectivity requirements."""


class UnsupportedCombination(ConfigurationError):
    """Two individually valid options cannot be used together."""


class BudgetExceeded(DistOptError):
    """A run hit its budget before meeting its target.

    The partial state (a trace or an intermediate matrix) is attached as
    ``partial`` so callers can inspect how far the run got.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DivergenceError(DistOptError):
    """Iterates blew up; ``trace`` holds everything recorded so far."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
