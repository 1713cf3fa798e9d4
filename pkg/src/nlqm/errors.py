"""Exception hierarchy shared across the package."""


class NLQMError(Exception):
    """Base class for all errors raised by :mod:`nlqm`."""


class DomainError(NLQMError, ValueError):
    """An argument lies outside the domain of a function."""


class InadmissibleError(NLQMError, ValueError):
    """Parameters violate the admissibility condition of an equation branch."""


class SingularityError(NLQMError, ArithmeticError):
    """Evaluation hit a singular point (x <= 0, a pole, a vanishing denominator)."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class TurningPointError(SingularityError):
    """Level-surface radicand is non-positive inside a quadrature interval."""


class IntegrationError(NLQMError, RuntimeError):
    """Numerical integration failed; ``partial`` holds the trajectory so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConvergenceError(NLQMError, RuntimeError):
    """An iterative scheme exceeded its iteration cap."""
