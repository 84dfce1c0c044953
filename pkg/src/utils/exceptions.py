"""Custom exception classes for the monotone codec."""


class MonotoneCodecError(Exception):
    """Base exception for all monotone codec errors."""
    pass


class ConfigurationError(MonotoneCodecError):
    """Raised when there's a configuration error."""
    pass


class ValidationError(MonotoneCodecError):
    """Raised when input validation fails."""
    pass


class InvalidInputError(MonotoneCodecError):
    """Raised when a value cannot be represented by the requested code."""
    pass


class TruncatedStreamError(MonotoneCodecError):
    """Raised when a bit stream ends in the middle of a codeword."""
    pass


class CorruptStreamError(MonotoneCodecError):
    """Raised when decoded fields are inconsistent with each other."""
    pass


class ContainerFormatError(CorruptStreamError):
    """Raised when the container magic or version does not match."""
    pass


class ModelMismatchError(MonotoneCodecError):
    """Raised when a symbol has zero frequency under the coding model."""
    pass


class QuantizationError(MonotoneCodecError):
    """Raised when a parameter vector cannot be quantized monotonically."""
    pass


class BudgetExceededError(MonotoneCodecError):
    """Raised when an enumeration or run exceeds its allowed size."""
    pass
