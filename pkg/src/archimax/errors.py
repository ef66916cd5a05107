"""Exception types shared across the package."""


class ArchimaxError(Exception):
    """Base class for package errors."""


class DomainError(ArchimaxError, ValueError):
    """Parameter or argument outside the admissible range."""


class NumericError(ArchimaxError, ArithmeticError):
    """A numerical routine failed to reach its tolerance.

    Attributes
    ----------
    achieved : float
        Error estimate reached before giving up.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(message)
        self.achieved = achieved


class PrecisionError(NumericError):
    """Finite-difference derivative too noisy to be trusted."""


class UnsupportedError(ArchimaxError, NotImplementedError):
    """Requested configuration is outside what is implemented."""
