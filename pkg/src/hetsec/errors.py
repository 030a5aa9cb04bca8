"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class EvaluationError(ArithmeticError):
    """An integrand produced a non-finite value."""

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class ConvergenceError(ArithmeticError):
    """A numerical method failed to reach its tolerance.

    The best estimate reached so far is kept on the exception so callers
    can decide whether it is usable.
    """

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class ConsistencyError(ArithmeticError):
    """A closed form returned something that cannot be a probability."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ModelWarning(UserWarning):
    """Inputs are valid but outside the regime an approximation assumes."""
