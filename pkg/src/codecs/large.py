"""Large-alphabet two-part code on the LARGE grid with per-point counts."""
from fractions import Fraction
from typing import List, Optional, Sequence

from ..bitio import BitReader, BitWriter
from ..estimators import EmpiricalCounts, empirical_counts, ml_description_length
from ..grids import DEFAULT_ALPHA, Grid, GridMode, GridSpec, build_grid
from ..param_codec import decode_params_counts, encode_params_counts
from ..utils.exceptions import ValidationError
from .base import (
    MAX_ALPHABET,
    SectionCost,
    code_direct,
    decode_direct,
    fit_monotone,
    frequency_table,
    grid_length,
    payload_length_bits,
    read_payload,
    write_payload,
)


def large_grid(n: int, alpha: Fraction = DEFAULT_ALPHA) -> Grid:
    # The LARGE grid does not depend on k.
    return build_grid(GridSpec(GridMode.LARGE, grid_length(n), 1, alpha))


def encode_large(x: Sequence[int], writer: BitWriter,
                 counts: Optional[EmpiricalCounts] = None) -> SectionCost:
    """Write the counts-scheme parameters and the payload.

    Raises:
        ValidationError: If the largest symbol is too large to code directly
        QuantizationError: If the grid cannot hold a monotone vector of this support
    """
    counts = counts or empirical_counts(x)
    if counts.k_max > MAX_ALPHABET:
        raise ValidationError(f"Largest symbol {counts.k_max} is too large for the large-alphabet code")

    qp = fit_monotone(counts, large_grid(counts.n))
    cost = SectionCost()
    cost.params = encode_params_counts(qp, writer)
    payload, cost.ideal_payload = code_direct(x, counts, frequency_table(list(qp.value_runs())))
    cost.length_field = write_payload(writer, payload)
    cost.payload = payload.bit_length
    return cost


def decode_large(reader: BitReader, n: int) -> List[int]:
    """Inverse of encode_large."""
    qp = decode_params_counts(reader, large_grid(n), max_support=MAX_ALPHABET)
    table = frequency_table(list(qp.value_runs()))
    return decode_direct(read_payload(reader), table, n)


def large_lower_bound(counts: EmpiricalCounts, ideal: Optional[float] = None) -> float:
    """Bits encode_large can never undercut; the counts scheme spends a bit per grid point."""
    ideal = ml_description_length(counts) if ideal is None else ideal
    return large_grid(counts.n).B + payload_length_bits(ideal) + ideal - 1
