"""Exceptions and warnings specific to resalloc."""


# Exceptions
class ResallocError(Exception):
    """Base class of the errors raised by resalloc."""


class DomainError(ResallocError, ValueError):
    """Raised when a multiplier lies outside (or on the margin of) the dual
    domain of a cost function.

    ``coordinate`` is the offending coordinate index. When raised during a
    simulation, ``node`` and ``time`` locate the failure.
    """

    def __init__(self, message, coordinate=None, node=None, time=None):
        super().__init__(message)
        self.coordinate = coordinate
        self.node = node
        self.time = time

    def locate(self, node, time):
        """Attach the node and time at which the error occurred and return
        ``self``."""
        self.node = node
        self.time = time
        self.args = (f"node {node}, t = {time:g} s: {self.args[0]}",)
        return self


class NumericError(ResallocError, ArithmeticError):
    """Raised when an iterative solver fails to converge."""


class GraphError(ResallocError, ValueError):
    """Raised when encountering issues with digraphs or graph schedules."""


class ScheduleRangeError(ResallocError, IndexError):
    """Raised when a graph schedule is queried outside of its time range."""


class SchedulingError(ResallocError, RuntimeError):
    """Raised when a communication event is requested off the sampling grid."""


class ParameterError(ResallocError, ValueError):
    """Raised when a design parameter is out of its admissible range."""


class ConfigError(ResallocError, ValueError):
    """Raised when a scenario configuration is inconsistent."""


class UnitsError(ConfigError):
    """Raised when a value is set with missing or incompatible units."""


class ScenarioError(ConfigError):
    """Raised when a scenario file cannot be parsed or validated. ``line`` is
    the 1-based line of the offending entry, if known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SimulationAbort(ResallocError, RuntimeError):
    """Raised when a simulation stops before its horizon. The partially
    recorded trajectory is available as ``trajectory`` and the original error
    as ``__cause__``."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


# Warnings
class ConfigWarning(UserWarning):
    """Used when encountering nonfatal configuration issues."""
    pass


class DesignWarning(UserWarning):
    """Used when a design formula is evaluated as printed although it is
    inconsistent with a related condition."""
    pass
