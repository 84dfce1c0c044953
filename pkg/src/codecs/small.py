"""Small-alphabet two-part code on the SMALL_K grid with differential parameters."""
from typing import List, Optional, Sequence

from ..bitio import BitReader, BitWriter, ceil_log2, elias_delta_length
from ..estimators import EmpiricalCounts, empirical_counts, ml_description_length
from ..grids import Grid, GridMode, GridSpec, build_grid
from ..param_codec import decode_params_differential, encode_params_differential
from ..utils.exceptions import CorruptStreamError, ValidationError
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


def small_grid(n: int, k_hat: int) -> Grid:
    return build_grid(GridSpec(GridMode.SMALL_K, grid_length(n), k_hat))


def encode_small(x: Sequence[int], k_hat: int, writer: BitWriter,
                 counts: Optional[EmpiricalCounts] = None) -> SectionCost:
    """Write the SMALL_K fields, the differential parameters and the payload.

    Args:
        x: Sequence with every symbol <= k_hat
        k_hat: Announced alphabet size
        writer: Destination stream
        counts: Precomputed counts of x

    Returns:
        Bit accounting of what was written

    Raises:
        ValidationError: If a symbol exceeds k_hat or k_hat is too large to code
    """
    counts = counts or empirical_counts(x)
    if counts.k_max > k_hat:
        raise ValidationError(f"Symbol {counts.k_max} exceeds the announced alphabet size {k_hat}")
    if k_hat > MAX_ALPHABET:
        raise ValidationError(f"Alphabet size {k_hat} is too large for the small-alphabet code")

    qp = fit_monotone(counts, small_grid(counts.n, k_hat))
    cost = SectionCost()

    start = writer.bit_length
    writer.write_delta(k_hat)
    writer.write_fixed(qp.support - 1, ceil_log2(k_hat))
    cost.config = writer.bit_length - start
    cost.params = encode_params_differential(qp, writer)

    payload, cost.ideal_payload = code_direct(x, counts, frequency_table(list(qp.value_runs())))
    cost.length_field = write_payload(writer, payload)
    cost.payload = payload.bit_length
    return cost


def decode_small(reader: BitReader, n: int) -> List[int]:
    """Inverse of encode_small.

    Raises:
        CorruptStreamError: If the announced sizes are inconsistent
    """
    k_hat = reader.read_delta()
    if k_hat > MAX_ALPHABET:
        raise CorruptStreamError(f"Announced alphabet size {k_hat} is out of range")
    support = reader.read_fixed(ceil_log2(k_hat)) + 1
    if support > k_hat:
        raise CorruptStreamError(f"Support {support} exceeds the alphabet size {k_hat}")
    qp = decode_params_differential(reader, small_grid(n, k_hat), support)
    table = frequency_table(list(qp.value_runs()))
    return decode_direct(read_payload(reader), table, n)


def small_lower_bound(counts: EmpiricalCounts, k_hat: int, ideal: Optional[float] = None) -> float:
    """Bits encode_small can never undercut; every differential codeword takes a bit."""
    ideal = ml_description_length(counts) if ideal is None else ideal
    return (elias_delta_length(k_hat) + ceil_log2(k_hat) + counts.k_max - 1
            + payload_length_bits(ideal) + ideal - 1)
