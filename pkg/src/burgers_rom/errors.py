"""Exception types shared across the package.

The CLI maps ``ConfigError`` (and plain ``ValueError``) to exit code 2 and
``NumericsError`` subclasses to exit code 3.
"""


class ConfigError(ValueError):
    """Bad configuration file or parameter value."""


class InvalidMeshError(ConfigError):
    """Mesh cannot support interior degrees of freedom."""


class NumericsError(RuntimeError):
    """Base class for runtime numerical failures."""


class NewtonError(NumericsError):
    """Newton iteration failed to reach the residual tolerance."""

    def __init__(self, message, residual=None, time=None):
        super().__init__(message)
        self.residual = residual
        self.time = time


class DivergenceError(NumericsError):
    """NaN or Inf appeared in the full-order solver state."""


class BlowUpError(NumericsError):
    """ROM time integration produced a non-finite state."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class EmptyBasisError(NumericsError):
    """All snapshot eigenvalues fell below the rank cutoff."""


class DegenerateDataError(NumericsError):
    """Calibration data carries no signal (all-zero Gram matrix)."""
