"""Exception hierarchy shared by every module."""


class KappaError(Exception):
    """Base class for all package errors."""


class ParameterError(KappaError, ValueError):
    """An argument is outside its documented range."""


class DomainError(KappaError, ValueError):
    """A point lies outside the interval a function is defined on."""


class ModeError(KappaError, TypeError):
    """The requested computation path does not apply to these inputs."""


class HypothesisError(KappaError, ValueError):
    """Inputs do not satisfy the hypotheses of the inequality being checked."""


class ConcavityError(HypothesisError):
    """A weight that must be concave is not."""


class DegenerateInputError(KappaError, ValueError):
    """The quotient is undefined because a denominator integral vanishes."""


class ConvergenceError(KappaError, RuntimeError):
    """An iterative procedure stopped before meeting its tolerance.

    ``best_estimate`` and ``error_estimate`` carry whatever the procedure had
    when it gave up, so callers can still inspect it.
    """

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class ConfigError(KappaError, ValueError):
    """A configuration document violates its schema."""
