"""Exception types raised across the package."""


class RotBoxError(ValueError):
    """Base class for all rotbox errors."""


class InvalidRectError(RotBoxError):
    """Rectangle parameters are non-finite, non-positive, or non-canonical."""


class InvalidParameterError(RotBoxError):
    """An operation parameter is out of its documented range."""


class InvalidDeltaError(RotBoxError):
    """A regression delta cannot be decoded into a valid rectangle."""


class ConfigError(RotBoxError):
    """An anchor or loss configuration violates its invariants."""


class DataFormatError(RotBoxError):
    """A data file is malformed; message carries the offending location."""
