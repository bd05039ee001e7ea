"""Exception types raised across the package."""


class SkorohodError(ValueError):
    """Base class for all input errors raised by this package."""


class ValidationError(SkorohodError):
    """An object could not be built from the given data."""


class DomainError(SkorohodError):
    """An argument lies outside the domain of an operation."""


class SizeError(SkorohodError):
    """An input exceeds a configured size cap."""
