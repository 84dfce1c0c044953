"""Tests for estimators module."""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from sklearn.isotonic import IsotonicRegression

from src.estimators import (
    MonotoneParamVector,
    description_length,
    empirical_counts,
    entropy,
    ml_description_length,
    ml_estimate,
    monotone_ml,
    monotone_ml_description_length,
    pava_blocks,
)
from src.utils.exceptions import InvalidInputError, ValidationError
from tests.fixtures.sample_data import PAVA_CASES


def test_empirical_counts_basic():
    """Test counts and tail helpers."""
    c = empirical_counts([1, 3, 3, 7, 1, 1])
    assert c.n == 6
    assert c.k_max == 7
    assert c.count(1) == 3
    assert c.count(2) == 0
    assert c.head_count(3) == 5
    assert c.tail_count(3) == 1
    assert c.distinct_tail(1) == 2
    assert c.tail_symbols(2) == [(3, 2), (7, 1)]
    assert c.largest_at_most(6) == 3
    assert c.dense() == [3, 0, 2, 0, 0, 0, 1]


def test_empirical_counts_rejects_zero():
    """Test non-positive symbols are rejected."""
    with pytest.raises(InvalidInputError):
        empirical_counts([1, 0, 2])


def test_tail_log_sum_counts_distinct_symbols():
    """Test the tail log-sum uses each distinct symbol once."""
    c = empirical_counts([1, 4, 4, 8])
    assert c.tail_log_sum(2) == pytest.approx(2 + 3)
    assert c.tail_log_sum(0.5) == pytest.approx(0 + 2 + 3)
    assert c.tail_log_sum(8) == 0


def test_ml_estimate_values():
    """Test the standard ML estimate."""
    assert ml_estimate(empirical_counts([1, 1, 3])) == [Fraction(2, 3), 0, Fraction(1, 3)]


@pytest.mark.parametrize("x,expected", PAVA_CASES)
def test_pava_blocks_hand_checked(x, expected):
    """Test pooled blocks against hand-computed monotone ML."""
    c = empirical_counts(x)
    blocks = pava_blocks(c)
    assert [(b.start, b.length, b.value(c.n)) for b in blocks] == expected


def test_monotone_ml_is_monotone_and_normalized(rng):
    """Test fuzzed monotone ML vectors are non-increasing and sum to one."""
    for _ in range(300):
        x = [int(v) for v in rng.integers(1, 12, size=int(rng.integers(1, 40)))]
        theta = monotone_ml(empirical_counts(x))
        assert sum(theta.probs) == 1
        assert all(a >= b for a, b in zip(theta.probs, theta.probs[1:]))


def test_monotone_ml_lower_bound(rng):
    """Test every monotone ML component is at least 1/(k n)."""
    for _ in range(1000):
        n = int(rng.integers(1, 60))
        x = [int(v) for v in rng.integers(1, 30, size=n)]
        c = empirical_counts(x)
        theta = monotone_ml(c)
        assert min(theta.probs) >= Fraction(1, c.k_max * n)


def test_monotone_ml_matches_isotonic_regression(rng):
    """Test PAVA agrees with scikit-learn's isotonic regression of frequencies."""
    for _ in range(100):
        x = [int(v) for v in rng.geometric(0.3, size=int(rng.integers(5, 80)))]
        c = empirical_counts(x)
        freqs = np.array(c.dense(), dtype=float) / c.n
        fitted = IsotonicRegression(increasing=False).fit_transform(
            np.arange(1, c.k_max + 1, dtype=float), freqs
        )
        ours = np.array([float(p) for p in monotone_ml(c).probs])
        assert np.allclose(ours, fitted, atol=1e-12)


def _monotone_grid(k: int, steps: int):
    for combo in itertools.product(range(steps + 1), repeat=k - 1):
        last = steps - sum(combo)
        values = list(combo) + [last]
        if last >= 0 and all(a >= b for a, b in zip(values, values[1:])):
            yield [v / steps for v in values]


def _log_likelihood(counts, theta):
    total = 0.0
    for c, p in zip(counts, theta):
        if c:
            if p <= 0:
                return -math.inf
            total += c * math.log2(p)
    return total


def test_monotone_ml_beats_exhaustive_grid():
    """Test PAVA attains the best likelihood over a fine monotone grid."""
    for k in (2, 3):
        grid = list(_monotone_grid(k, 60))
        for n in range(1, 9):
            types = {tuple(seq.count(i) for i in range(1, k + 1))
                     for seq in itertools.product(range(1, k + 1), repeat=n)}
            for counts in sorted(types):
                c = empirical_counts([i + 1 for i, cnt in enumerate(counts) for _ in range(cnt)])
                theta = [float(p) for p in monotone_ml(c).probs] + [0.0] * (k - c.k_max)
                best = max(_log_likelihood(counts, t) for t in grid)
                ours = _log_likelihood(counts, theta)
                assert ours >= best - 1e-9
                assert ours - best < 0.5


def test_description_lengths_hand_checked():
    """Test ML and monotone ML description lengths on small sequences."""
    c = empirical_counts([1, 1, 2, 1])
    expected = 3 * math.log2(4 / 3) + 2
    assert ml_description_length(c) == pytest.approx(expected)
    assert monotone_ml_description_length(c) == pytest.approx(expected)

    c = empirical_counts([2, 2])
    assert ml_description_length(c) == 0
    assert monotone_ml_description_length(c) == pytest.approx(2.0)


def test_description_length_zero_probability():
    """Test a zero-probability symbol gives an infinite description length."""
    assert description_length([1, 3], [0.5, 0.5]) == math.inf
    assert description_length([1, 2], [0.5, 0.5]) == pytest.approx(2.0)


def test_entropy_values():
    """Test entropy of simple vectors."""
    assert entropy([0.5, 0.5]) == pytest.approx(1.0)
    assert entropy([1.0]) == 0
    assert entropy([Fraction(1, 4)] * 4) == pytest.approx(2.0)


def test_param_vector_rejects_increasing():
    """Test a non-monotone vector is rejected."""
    with pytest.raises(ValidationError):
        MonotoneParamVector((Fraction(1, 4), Fraction(3, 4)))
    with pytest.raises(ValidationError):
        MonotoneParamVector((Fraction(1, 2), Fraction(1, 4)))
