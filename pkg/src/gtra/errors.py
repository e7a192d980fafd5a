"""Exception types shared across the package."""


class GtraError(Exception):
    """Base class for all package errors."""


class DimensionError(GtraError):
    """Strategy length does not match the instance's target count."""


class NumericError(GtraError):
    """A numerical computation produced a non-finite intermediate."""


class CapacityError(GtraError):
    """A requested exhaustive computation exceeds the supported size."""


class ConfigError(GtraError):
    """A configuration document failed validation."""
