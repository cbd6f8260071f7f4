"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A model or numerical parameter is outside its valid range."""


class OutOfDomainError(ValueError):
    """A formula was asked for a value outside the region where it holds."""


class EmptyPatternError(ValueError):
    """An operation needs at least one point but the pattern is empty."""


class InfiniteSirError(ArithmeticError):
    """The realization has no interferer, so the SIR is unbounded."""


class NumericalFailureError(RuntimeError):
    """An iterative or quadrature routine failed to reach its tolerance.

    ``diagnostics`` carries whatever partial information the routine had
    (iterations used, last error estimate, ...).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class WindowTooSmallError(RuntimeError):
    """Too many samples were rejected for lack of interferers."""

    def __init__(self, message, rejected, n_samples):
        super().__init__(message)
        self.rejected = rejected
        self.n_samples = n_samples
