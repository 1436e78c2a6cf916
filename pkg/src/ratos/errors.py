"""Exception and warning types shared across the package."""


class RatosError(Exception):
    """Base class for package-specific errors."""


class DomainError(RatosError, ValueError):
    """A physical parameter is outside its valid domain."""


class ResolutionError(RatosError, ValueError):
    """A grid is too coarse to resolve the requested feature."""


class GridError(RatosError):
    """Solver grid violates a stability or resolution requirement."""


class AccuracyError(RatosError):
    """A refinement check did not converge to the required tolerance."""


class ProtocolError(RatosError):
    """An experiment schedule violates a protocol validity condition."""


class FitError(RatosError):
    """Nonlinear least squares failed to converge.

    Carries the iteration trace in ``trace`` (list of (params, cost))."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


class ScheduleSyntaxError(RatosError, ValueError):
    """Schedule expression failed to parse.

    ``line`` and ``column`` are 1-based positions of the offending token."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.bare_message = message
        self.line = line
        self.column = column


class ConfigError(RatosError, ValueError):
    """Experiment config file is invalid. ``line`` is 1-based (0 = whole file)."""

    def __init__(self, message, line=0):
        if line:
            super().__init__(f"{message} (line {line})")
        else:
            super().__init__(message)
        self.bare_message = message
        self.line = line


class RatosWarning(UserWarning):
    """Base class for package diagnostics."""


class TruncationWarning(RatosWarning):
    """Part of the output never exited within the time grid."""


class WeakProbeWarning(RatosWarning):
    """Signal amplitude is too strong for the weak-probe linearization."""


class ContainmentWarning(RatosWarning):
    """Pulse is not (fully) inside the cell when a control transition occurs."""
