"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a run configuration is inconsistent or incomplete."""


class NumericalFailure(RuntimeError):
    """Raised when an iterative solver fails to reach its tolerance.

    The last residual norm is attached so callers can log or report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
