"""Exception and warning classes raised by the evaluation routines."""

from __future__ import annotations


class TodaWhittakerError(Exception):
    """Base class for all domain errors of the package."""


class NearSingularSpectral(TodaWhittakerError, ValueError):
    """A recurrence denominator <nu - 2 xi, nu> came within eta of zero.

    ``nu`` is the offending cone vector and ``w`` (when raised from a
    group sum) the signed permutation whose image of xi failed.
    """

    def __init__(self, message, *, nu=None, value=None, w=None):
        super().__init__(message)
        self.nu = nu
        self.value = value
        self.w = w


class TailNotConverged(TodaWhittakerError):
    """The certified tail bound exceeds the requested tolerance."""

    def __init__(self, message, *, bound=None, tol=None):
        super().__init__(message)
        self.bound = bound
        self.tol = tol


class CFunctionPole(TodaWhittakerError, ValueError):
    def __init__(self, message, *, argument=None, w=None):
        super().__init__(message)
        self.argument = argument
        self.w = w


class CoefficientPole(TodaWhittakerError, ValueError):
    """A denominator factor of a difference-operator coefficient vanishes."""

    def __init__(self, message, *, factor=None):
        super().__init__(message)
        self.factor = factor


class ParameterPole(TodaWhittakerError, ValueError):
    pass


class QuadratureNotConverged(TodaWhittakerError):
    pass


class PrecisionExhausted(TodaWhittakerError):
    def __init__(self, message, *, condition=None, prec=None):
        super().__init__(message)
        self.condition = condition
        self.prec = prec


class ChamberViolation(TodaWhittakerError, ValueError):
    pass


class ConfluencePrecision(UserWarning):
    """Truncation error is not small compared with the confluence gap."""


class CancellationWarning(UserWarning):
    """A group sum lost more digits than the tolerance allows."""
