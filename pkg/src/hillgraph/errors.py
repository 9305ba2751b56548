"""Exception hierarchy shared by every module."""


class HillGraphError(Exception):
    """Base class for all library errors."""


class DomainError(HillGraphError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NumericError(HillGraphError, ArithmeticError):
    """A numerical procedure (integration, root refinement) failed.

    ``lam`` carries the spectral parameter involved, when there is one.
    """

    def __init__(self, message, lam=None):
        super().__init__(message)
        self.lam = lam


class ResolutionError(NumericError):
    """Spectral features too close together to be separated by refinement."""


class UnavailableError(HillGraphError, LookupError):
    """The requested quantity does not exist for the given data.

    Raised e.g. when inverting the discriminant on a band that the search
    window clips.
    """


class ConfigError(HillGraphError, ValueError):
    """Invalid run configuration."""


class ConstructionError(HillGraphError, ValueError):
    """An eigenstate cannot be assembled on the requested support."""
