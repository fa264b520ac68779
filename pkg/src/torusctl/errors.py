"""Exception types shared across the package."""


class TorusError(Exception):
    """Base class for all errors raised by this package."""


class GeometryMismatchError(TorusError):
    """Two fields (or a field and an operator) live on different grids."""


class SubspaceError(TorusError):
    """A state has Fourier support outside the working subspace."""


class UncoveredSpectrumError(TorusError):
    """A state has spectral mass outside the range covered by a decomposition."""

    def __init__(self, message, uncovered_modes=None):
        super().__init__(message)
        self.uncovered_modes = list(uncovered_modes or [])


class NumericalError(TorusError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message, best_estimate=None, residual=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.residual = residual


class NoCertificateError(NumericalError):
    """The Ingham route produced no positive lower bound at this horizon."""


class ConfigError(TorusError):
    """A scenario configuration is malformed or out of documented range."""
