"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class DomainError(ValueError):
    """An evaluator was asked for a point outside its domain of validity."""


class AccuracyError(RuntimeError):
    """A quadrature error estimate exceeded the requested tolerance."""

    def __init__(self, message, estimate=None, tolerance=None):
        super().__init__(message)
        self.estimate = estimate
        self.tolerance = tolerance


class EvaluationError(RuntimeError):
    """An integrand produced non-finite samples."""


class PoleError(ArithmeticError):
    """Evaluation requested at (or numerically on top of) a pole."""
