"""Error taxonomy shared across the package.

Callers that need to distinguish "you gave me bad input" from "the model has
no answer here" can catch InvalidParameterError vs. the runtime errors
(NoStableEnsembleError, IntegrationFailureError).  The CLI maps the former to
exit code 1 and the latter to exit code 2.
"""


class PistonworkError(Exception):
    """Base class for every package-specific failure."""


class InvalidParameterError(PistonworkError, ValueError):
    """A parameter violates a documented precondition."""


class DomainError(InvalidParameterError):
    """A function argument lies outside its mathematical domain."""


class NoStationaryStateError(InvalidParameterError):
    """Slope alpha <= 0: the tilted-log potential is not confining, so the
    piston has no normalizable stationary density."""


class DegenerateDistributionError(InvalidParameterError):
    """Pointwise density requested from a zero-width (point-mass) slope
    distribution; use the exact point-mass code paths instead."""


class NoStableEnsembleError(PistonworkError):
    """The slope distribution puts no mass on alpha > 0 (success probability
    is zero), so conditional averages over stable realizations are undefined."""


class IntegrationFailureError(PistonworkError):
    """Adaptive quadrature could not reach the requested tolerance."""

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate
