"""Tests for validation module."""
import pytest

from src.utils.exceptions import ValidationError
from src.utils.validation import (
    MAX_SEQUENCE_LENGTH,
    validate_epsilon,
    validate_positive_int,
    validate_probability,
    validate_sequence,
    validate_theta,
)


def test_validate_sequence_valid():
    """Test validating a sequence of positive integers, big ones included."""
    validate_sequence([1, 2, 3, 2 ** 70])


def test_validate_sequence_empty():
    """Test validating an empty sequence."""
    with pytest.raises(ValidationError, match="n >= 1 required"):
        validate_sequence([])


@pytest.mark.parametrize("x", [[1, 0], [-3], [1, 2.0], [True], ["4"]])
def test_validate_sequence_bad_symbols(x):
    """Test non-positive and non-integer symbols are rejected."""
    with pytest.raises(ValidationError):
        validate_sequence(x)


def test_validate_sequence_reports_position():
    """Test the error names the offending position."""
    with pytest.raises(ValidationError, match="position 2"):
        validate_sequence([1, 1, 0])


def test_max_sequence_length_fits_coder():
    """Test the length cap stays below the coder's frequency total."""
    assert MAX_SEQUENCE_LENGTH < 2 ** 30


def test_validate_positive_int():
    """Test positive integers pass and everything else fails."""
    validate_positive_int('n', 1)
    for value in (0, -1, 1.5, True, None):
        with pytest.raises(ValidationError):
            validate_positive_int('n', value)


def test_validate_epsilon():
    """Test eps must lie strictly inside (0, 1)."""
    validate_epsilon(0.1)
    for value in (0, 1, -0.2, 'small'):
        with pytest.raises(ValidationError):
            validate_epsilon(value)


def test_validate_probability():
    """Test p must lie strictly inside (0, 1)."""
    validate_probability(0.5)
    for value in (0.0, 1.0, 2):
        with pytest.raises(ValidationError):
            validate_probability(value)


def test_validate_theta_valid():
    """Test a normalized non-increasing vector passes."""
    validate_theta([0.5, 0.25, 0.25])
    validate_theta([1.0, 0.0])


@pytest.mark.parametrize("theta", [
    [],
    [0.25, 0.75],
    [0.5, 0.6, -0.1],
    [0.5, 0.4],
])
def test_validate_theta_invalid(theta):
    """Test empty, increasing, negative and unnormalized vectors are rejected."""
    with pytest.raises(ValidationError):
        validate_theta(theta)
