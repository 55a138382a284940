"""Exception hierarchy shared by every module of the package."""


class EfimovError(Exception):
    """Base class for all package errors."""


class DomainError(EfimovError, ValueError):
    """Input lies outside the domain where the quantity is defined."""


class AccuracyError(EfimovError, ArithmeticError):
    """A numerical routine could not reach the requested accuracy.

    Attributes
    ----------
    estimate : complex or None
        Best value obtained before giving up.
    error : float or None
        Error estimate attached to ``estimate``.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SolverError(EfimovError, RuntimeError):
    """Root finder or ODE integrator failure.

    ``trace`` holds the iterate history when one is available.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class BranchError(SolverError):
    """Root found on the wrong sheet (Re kappa <= 0)."""


class FitError(EfimovError, ArithmeticError):
    """Least-squares or extrapolation fit is ill-conditioned or failed."""
