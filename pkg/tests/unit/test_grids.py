"""Tests for grids module."""
import math
from fractions import Fraction

import pytest

from src.grids import (
    Grid,
    GridMode,
    GridSpec,
    build_grid,
    iroot,
    kl_quantization_cost,
    lower_edge_exponent,
    quantize_monotone,
    quantize_runs,
)
from src.utils.exceptions import InvalidInputError, QuantizationError


def _local_step(grid: Grid, value: Fraction) -> Fraction:
    """Spacing of the interval holding value (the lower edge below the grid)."""
    lowest = Fraction(1, 1 << grid.exponent)
    if value < lowest:
        return lowest
    for j in range(1, grid.J + 1):
        low, high = grid.interval_edges(j)
        if low <= value < high:
            return grid.spacing(j)
    return grid.spacing(grid.J)


def _sorted_dirichlet(rng, k: int):
    weights = sorted((int(w) for w in rng.integers(1, 10 ** 6, size=k)), reverse=True)
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def test_iroot_exact_and_floor():
    """Test integer roots at and between perfect powers."""
    assert iroot(27, 3) == 3
    assert iroot(26, 3) == 2
    assert iroot(2 ** 90, 3) == 2 ** 30
    assert iroot(10 ** 30 + 1, 3) == 10 ** 10
    assert iroot(1, 5) == 1
    assert iroot(17, 1) == 17


def test_grid_spec_validation():
    """Test invalid grid specs are rejected."""
    with pytest.raises(InvalidInputError):
        GridSpec(GridMode.SMALL_K, 1, 2)
    with pytest.raises(InvalidInputError):
        GridSpec(GridMode.SMALL_K, 16, 0)
    with pytest.raises(InvalidInputError):
        GridSpec(GridMode.LARGE, 16, 1, Fraction(3, 2))


def test_lower_edge_exponents():
    """Test the number of dyadic intervals per grid family."""
    assert lower_edge_exponent(GridSpec(GridMode.SMALL_K, 1024, 4)) == 10
    assert lower_edge_exponent(GridSpec(GridMode.LARGE, 4096, 1)) == 24
    assert lower_edge_exponent(GridSpec(GridMode.IND_SMALL, 1024, 16)) == 20
    assert lower_edge_exponent(GridSpec(GridMode.FAST, 4096, 32)) == 13


def test_small_grid_point_count():
    """Test sqrt(k/n) spacing: n=1024, k=4 gives 8 points per interval."""
    grid = build_grid(GridSpec(GridMode.SMALL_K, 1024, 4))
    assert grid.J == 10
    assert grid.B == 80
    assert all(grid.interval_count(j) == 8 for j in range(1, grid.J + 1))


def test_large_grid_point_count():
    """Test n^(-1/3) spacing: n=2^12 gives 8 points in each of 24 intervals."""
    grid = build_grid(GridSpec(GridMode.LARGE, 4096, 1))
    assert grid.B == 192


def test_ind_small_grid_point_count():
    """Test m/n spacing: n=1024, m=16 gives 32 points per interval."""
    grid = build_grid(GridSpec(GridMode.IND_SMALL, 1024, 16))
    assert grid.B == 20 * 32


def test_grid_points_left_aligned_and_sorted():
    """Test every interval starts at its lower edge and points increase."""
    grid = build_grid(GridSpec(GridMode.SMALL_K, 5000, 7))
    assert list(grid.points) == sorted(set(grid.points))
    for j in range(1, grid.J + 1):
        low, high = grid.interval_edges(j)
        first = grid.interval_starts[j - 1]
        assert grid.point(first) == low
        last = first + grid.interval_count(j) - 1
        assert grid.point(last) < high
        assert grid.interval_of(first) == j
    assert grid.point(grid.B - 1) < 1


def test_grid_is_deterministic():
    """Test the same spec always yields the same grid."""
    spec = GridSpec(GridMode.FAST, 3000, 20)
    assert build_grid(spec).points == build_grid(GridSpec(GridMode.FAST, 3000, 20)).points


def test_floor_index():
    """Test floor_index at, just below and below all points."""
    grid = build_grid(GridSpec(GridMode.SMALL_K, 1024, 4))
    value = grid.point(37)
    assert grid.floor_index(value) == 37
    assert grid.floor_index(value - Fraction(1, 10 ** 30)) == 36
    assert grid.floor_index(Fraction(1, 10 ** 9)) == -1


def test_quantize_exact_grid_vector():
    """Test a vector already on the grid is unchanged and costs nothing."""
    grid = build_grid(GridSpec(GridMode.SMALL_K, 1024, 2))
    theta = [Fraction(1, 2), Fraction(1, 2)]
    qp = quantize_monotone(theta, grid)
    assert qp.values == tuple(theta)
    assert kl_quantization_cost(theta, qp) == 0


def test_quantize_rejects_bad_vectors():
    """Test increasing or non-positive vectors are rejected."""
    grid = build_grid(GridSpec(GridMode.SMALL_K, 1024, 2))
    with pytest.raises(QuantizationError):
        quantize_monotone([Fraction(1, 4), Fraction(3, 4)], grid)
    with pytest.raises(QuantizationError):
        quantize_runs([(Fraction(0), 2)], grid)


def test_quantize_reserved_mass():
    """Test reserved tail mass is excluded from the vector."""
    grid = build_grid(GridSpec(GridMode.SMALL_K, 4096, 3))
    theta = [Fraction(1, 2), Fraction(1, 4)]
    qp = quantize_monotone(theta, grid, reserved=Fraction(1, 4))
    assert sum(qp.values) + qp.reserved == 1
    assert qp.support == 2


def test_quantize_fuzzed_properties(rng):
    """Test monotonicity, exact normalization, local error and KL cost on fuzzed vectors."""
    for _ in range(150):
        k = int(rng.integers(2, 65))
        n = 1 << int(rng.integers(10, 17))
        theta = _sorted_dirichlet(rng, k)
        grid = build_grid(GridSpec(GridMode.SMALL_K, n, k))
        qp = quantize_monotone(theta, grid)
        values = qp.values
        assert len(values) == k
        assert sum(values) == 1
        assert all(a >= b for a, b in zip(values, values[1:]))
        for original, quantized in zip(theta[1:], values[1:]):
            assert abs(original - quantized) <= 2 * _local_step(grid, original)
        assert kl_quantization_cost(theta, qp) <= 5 * math.log2(math.e) * k


def test_quantize_long_runs():
    """Test a run-length vector with a million equal components stays run-length."""
    grid = build_grid(GridSpec(GridMode.LARGE, 1 << 20, 1))
    runs = [(Fraction(1, 4), 1), (Fraction(3, 4 * 10 ** 6), 10 ** 6)]
    qp = quantize_runs(runs, grid)
    assert qp.support == 10 ** 6 + 1
    assert len(qp.runs) <= 3
    assert sum(value * count for value, count in qp.value_runs()) == 1


def test_quantization_errors_sum_to_zero():
    """Test quantization errors sum to zero."""
    grid = build_grid(GridSpec(GridMode.SMALL_K, 2048, 3))
    theta = [Fraction(5, 10), Fraction(3, 10), Fraction(2, 10)]
    qp = quantize_monotone(theta, grid)
    assert sum(qp.errors) == 0
