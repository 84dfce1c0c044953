"""Input validation utilities."""
import math
from typing import Sequence

from .exceptions import ValidationError

# Coder frequencies are bounded by 2**30, and the plain type code uses counts
# directly as frequencies.
MAX_SEQUENCE_LENGTH = 2 ** 30 - 1


def validate_sequence(x: Sequence[int]) -> None:
    """Validate a sequence of positive integer symbols.

    Args:
        x: Symbols to compress

    Raises:
        ValidationError: If the sequence is empty, too long or holds a non-positive symbol
    """
    if len(x) == 0:
        raise ValidationError("n >= 1 required: the sequence is empty")

    if len(x) > MAX_SEQUENCE_LENGTH:
        raise ValidationError(
            f"Sequence length {len(x)} exceeds the supported maximum {MAX_SEQUENCE_LENGTH}"
        )

    for position, symbol in enumerate(x):
        if isinstance(symbol, bool) or not isinstance(symbol, int):
            raise ValidationError(
                f"Symbol at position {position} is not an integer: {symbol!r}"
            )
        if symbol < 1:
            raise ValidationError(
                f"Symbol at position {position} must be positive, got {symbol}"
            )


def validate_positive_int(name: str, value: int) -> None:
    """Validate that a named parameter is a positive integer.

    Raises:
        ValidationError: If value is not an integer >= 1
    """
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{name} must be an integer, got {type(value).__name__}")

    if value < 1:
        raise ValidationError(f"{name} must be positive, got {value}")


def validate_epsilon(eps: float) -> None:
    """Validate the slack parameter of the redundancy bounds.

    Raises:
        ValidationError: If eps is outside (0, 1)
    """
    if not isinstance(eps, (int, float)) or not 0 < eps < 1:
        raise ValidationError(f"eps must lie strictly between 0 and 1, got {eps}")


def validate_probability(p: float) -> None:
    """Validate a geometric success probability.

    Raises:
        ValidationError: If p is outside (0, 1)
    """
    if not isinstance(p, (int, float)) or not 0 < p < 1:
        raise ValidationError(f"p must lie strictly between 0 and 1, got {p}")


def validate_theta(theta: Sequence[float]) -> None:
    """Validate an explicit monotone probability vector.

    Raises:
        ValidationError: If theta is empty, negative, increasing somewhere or not normalized
    """
    if len(theta) == 0:
        raise ValidationError("theta cannot be empty")

    for i, value in enumerate(theta):
        if value < 0:
            raise ValidationError(f"theta[{i}] is negative: {value}")
        if i > 0 and value > theta[i - 1]:
            raise ValidationError(
                f"theta must be non-increasing, but theta[{i}]={value} > theta[{i - 1}]={theta[i - 1]}"
            )

    total = math.fsum(float(v) for v in theta)
    if abs(total - 1.0) > 1e-12:
        raise ValidationError(f"theta must sum to 1, got {total!r}")
