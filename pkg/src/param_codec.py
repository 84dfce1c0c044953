"""Lossless descriptions of quantized parameter vectors.

Two schemes are supported. The differential code sends grid indices from the
smallest parameter upward as gaps, and suits small alphabets. The counts code
sends, for every grid point from the largest down, how many parameters sit on
it, and suits alphabets larger than the grid. Both send index and count values
plus one, because Elias codes start at 1. The decoder assigns parameters to
symbols purely by monotone order.
"""
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from .bitio import BitReader, BitWriter, elias_delta_length
from .grids import Grid, QuantizedParams
from .utils.exceptions import CorruptStreamError, InvalidInputError


class ParamScheme(str, Enum):
    """Parameter description schemes."""
    DIFFERENTIAL = "differential"
    COUNTS = "counts"


def _check_indices(qp: QuantizedParams, grid: Grid) -> None:
    for index, _ in qp.runs:
        if not 0 <= index < grid.B:
            raise InvalidInputError(f"Grid index {index} outside a grid of {grid.B} points")


def encode_params_differential(qp: QuantizedParams, writer: BitWriter) -> int:
    """Write b_k+1, then b_i - b_{i+1} + 1 for i = k-1 down to 2.

    Returns:
        Number of bits written (0 when the support is a single symbol)
    """
    _check_indices(qp, qp.grid)
    start = writer.bit_length
    previous: Optional[int] = None
    for index, count in reversed(qp.runs):
        writer.write_delta(index + 1 if previous is None else index - previous + 1)
        # Repeated indices are gaps of zero, each the one-bit codeword delta(1).
        writer.write_unary_ones(count - 1)
        previous = index
    return writer.bit_length - start


def differential_length(qp: QuantizedParams) -> int:
    """Bits encode_params_differential would write."""
    bits = 0
    previous: Optional[int] = None
    for index, count in reversed(qp.runs):
        bits += elias_delta_length(index + 1 if previous is None else index - previous + 1)
        bits += count - 1
        previous = index
    return bits


def _leading(grid: Grid, runs: List[Tuple[int, int]], reserved: Fraction) -> Fraction:
    scale = 1 << grid.precision
    total = sum(count * grid.points[index] for index, count in runs)
    leading = 1 - reserved - Fraction(total, scale)
    if runs and leading < Fraction(grid.points[runs[0][0]], scale):
        raise CorruptStreamError("Decoded parameters are not monotone")
    if leading <= 0:
        raise CorruptStreamError("Decoded parameters leave no mass for the first symbol")
    return leading


def decode_params_differential(reader: BitReader, grid: Grid, support: int,
                               reserved: Fraction = Fraction(0)) -> QuantizedParams:
    """Inverse of encode_params_differential for a known support size.

    Raises:
        CorruptStreamError: If an index falls outside the grid or mass is inconsistent
    """
    if support < 1:
        raise CorruptStreamError(f"Support size must be positive, got {support}")
    ascending: List[List[int]] = []  # smallest parameter first
    index = 0
    for _ in range(support - 1):
        index += reader.read_delta() - 1
        if index >= grid.B:
            raise CorruptStreamError(f"Decoded grid index {index} outside a grid of {grid.B} points")
        if ascending and ascending[-1][0] == index:
            ascending[-1][1] += 1
        else:
            ascending.append([index, 1])
    runs = [(index, count) for index, count in reversed(ascending)]
    return QuantizedParams(grid=grid, leading=_leading(grid, runs, reserved),
                           runs=tuple(runs), reserved=reserved)


def encode_params_counts(qp: QuantizedParams, writer: BitWriter) -> int:
    """Write count_j + 1 for every grid point j from the largest down.

    Returns:
        Number of bits written (always at least B)
    """
    grid = qp.grid
    _check_indices(qp, grid)
    start = writer.bit_length
    next_index = grid.B - 1
    for index, count in qp.runs:
        writer.write_unary_ones(next_index - index)
        writer.write_delta(count + 1)
        next_index = index - 1
    writer.write_unary_ones(next_index + 1)
    return writer.bit_length - start


def counts_length(qp: QuantizedParams) -> int:
    """Bits encode_params_counts would write."""
    empty = qp.grid.B - len(qp.runs)
    return empty + sum(elias_delta_length(count + 1) for _, count in qp.runs)


def decode_params_counts(reader: BitReader, grid: Grid, reserved: Fraction = Fraction(0),
                         max_support: Optional[int] = None) -> QuantizedParams:
    """Inverse of encode_params_counts.

    Args:
        reader: Stream positioned at the first count
        grid: Grid rebuilt from the header
        reserved: Tail mass set aside outside the vector
        max_support: Largest plausible support; exceeding it marks the stream corrupt

    Raises:
        CorruptStreamError: If the counts are implausible or mass is inconsistent
    """
    runs: List[Tuple[int, int]] = []
    support = 1
    for index in range(grid.B - 1, -1, -1):
        count = reader.read_delta() - 1
        if count:
            support += count
            if max_support is not None and support > max_support:
                raise CorruptStreamError(
                    f"Decoded support {support} exceeds the plausible maximum {max_support}"
                )
            runs.append((index, count))
    return QuantizedParams(grid=grid, leading=_leading(grid, runs, reserved),
                           runs=tuple(runs), reserved=reserved)


def params_length(qp: QuantizedParams, scheme: ParamScheme) -> int:
    """Bits needed to describe qp under scheme."""
    if scheme is ParamScheme.DIFFERENTIAL:
        return differential_length(qp)
    return counts_length(qp)


def encode_params(qp: QuantizedParams, scheme: ParamScheme, writer: BitWriter) -> int:
    """Dispatch to the scheme's encoder."""
    if scheme is ParamScheme.DIFFERENTIAL:
        return encode_params_differential(qp, writer)
    return encode_params_counts(qp, writer)
