"""Exception hierarchy shared by every module."""


class MeansError(Exception):
    """Base class for all errors raised by means_lab."""


class DomainError(MeansError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NumericalError(MeansError, ArithmeticError):
    """A numerical kernel failed to reach its tolerance.

    ``residual`` carries the last error estimate when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConstructionError(MeansError, ValueError):
    """A mean, generating function or distribution could not be built."""


class SpecParseError(MeansError, ValueError):
    """A textual mean specification could not be parsed."""

    def __init__(self, message, position=0):
        super().__init__(f"{message} (at position {position})")
        self.position = position
