"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateGeometryError(DomainError):
    """Channel vectors are (numerically) linearly dependent.

    Raised by zero-forcing when the interferer matrix loses column rank,
    e.g. two users sharing the same location.
    """


class ConfigError(ValueError):
    """A run configuration document is malformed."""
