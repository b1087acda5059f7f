"""Exception types shared across the package."""


class ZharmError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(ZharmError, ValueError):
    """Bad arguments or malformed input data."""


class GridSizeError(ValidationError):
    """A spectral grid is too small for the requested computation."""


class AccuracyError(ZharmError):
    """A quadrature or truncation error estimate exceeds the caller's tolerance."""


class ConsistencyError(ZharmError):
    """Two independent computation routes disagree beyond tolerance."""
