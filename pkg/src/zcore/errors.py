"""Exception types shared across the package."""


class ZcoreError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(ZcoreError):
    """A file does not conform to its declared on-disk format."""


class ShapeError(ZcoreError):
    """An array has the wrong dimensionality for its role."""


class ValidationError(ZcoreError):
    """Data violates an invariant (non-finite values, empty inputs, ...)."""


class AlignmentError(ZcoreError):
    """Matrices that must share a row count do not."""


class ConfigError(ZcoreError):
    """A configuration value is out of range or inconsistent with the data."""


class DomainError(ZcoreError):
    """A numeric argument is outside the mathematical domain of an operation."""
