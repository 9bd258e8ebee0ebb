"""Exception types shared across the package."""


class GaovalError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GaovalError, ValueError):
    """A parameter object or configuration violates its invariants."""


class DomainError(GaovalError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericalFailure(GaovalError):
    """A numerical routine failed to converge.

    Carries the last estimate so callers can decide whether to salvage it.
    """

    def __init__(self, message, last_estimate=None):
        super().__init__(message)
        self.last_estimate = last_estimate


class BracketingError(GaovalError):
    """Root bracket endpoints do not have opposite signs."""


class NoSolutionError(GaovalError):
    """The target value is not attainable within the search range."""


class FittingError(GaovalError):
    """Parameter fitting cannot proceed (degenerate or insufficient data)."""


class OutOfRangeError(GaovalError):
    """A table-backed model was queried beyond its age range."""


class IllPosedProblemError(GaovalError):
    """Market/preference constants make the value function diverge."""


class UnsupportedRegimeError(GaovalError):
    """A rate regime (e.g. r <= 0) outside the model's scope."""


class EstimationError(GaovalError):
    """Monte Carlo estimation failed (e.g. every path was ruined)."""


class ConfigError(GaovalError):
    """A config or data file could not be parsed."""
