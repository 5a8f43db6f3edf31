"""Exception types shared across the package."""


class NullwaveError(Exception):
    """Base class for all package errors."""


class GridMismatchError(NullwaveError):
    """Two fields on different grids were combined."""


class InvalidFieldError(NullwaveError):
    """A field contains NaN or Inf samples."""


class EmptyRegionError(NullwaveError):
    """A reduction was requested over an empty mask."""


class UnsupportedOrderError(NullwaveError):
    """A derivative order beyond the supported cap was requested."""


class NearOriginError(NullwaveError):
    """A tangential (ghost) derivative was evaluated too close to r = 0."""


class DomainExceededError(NullwaveError):
    """A quadrature domain extends outside the grid."""


class InvalidSourceError(NullwaveError):
    """A source term returned non-finite values."""

    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"non-finite source at t={t}")


class BlowUpError(NullwaveError):
    """The sup norm of the solution exceeded the blow-up threshold."""

    def __init__(self, t, history, message=None):
        self.t = t
        self.history = list(history)
        super().__init__(message or f"blow-up detected at t={t}")


class OutOfDomainError(NullwaveError):
    """An operator identity was evaluated outside its validity region."""


class InsufficientSlabError(NullwaveError):
    """Not enough time levels were supplied for the requested differencing."""


class UnfittableError(NullwaveError):
    """A power-law fit was requested on nonpositive or degenerate data."""


class UndefinedRatioError(NullwaveError):
    """A contraction ratio was requested for identical iterates."""


class ConfigError(NullwaveError):
    """A configuration file failed validation."""
