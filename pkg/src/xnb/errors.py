"""Exception types shared across the package."""


class XnbError(Exception):
    """Base class for all errors raised by this package."""


class DataError(XnbError):
    """Raised when input data cannot be loaded or fails validation."""


class ModelFormatError(XnbError):
    """Raised when a model file is unreadable or has an unexpected schema."""
