"""Individual-sequence code: a one-bit flag selects the monotone or the plain branch.

The monotone branch is the clustered-tail code on the individual-sequence
grids. The plain branch is an exact type code: delta(k_max) followed by
delta(n_x(i) + 1) for every i < k_max (the last count follows from n), with
the empirical counts themselves as coder frequencies.
"""
from typing import List, Optional, Sequence

from ..bitio import BitReader, BitWriter, elias_delta_length
from ..estimators import EmpiricalCounts, empirical_counts, ml_description_length
from ..utils.exceptions import CorruptStreamError, ValidationError
from ..utils.logger import get_logger
from .base import (
    MAX_ALPHABET,
    Candidate,
    CodecConfig,
    CodecMode,
    SectionCost,
    code_direct,
    count_table,
    decode_direct,
    payload_length_bits,
    read_payload,
    select_best,
    write_payload,
)
from .fast import (
    clustered_lower_bound,
    decode_clustered,
    effective_alphabet_candidates,
    encode_clustered,
)

logger = get_logger(__name__)


def encode_individual_monotone(x: Sequence[int], m: int, writer: BitWriter,
                               counts: Optional[EmpiricalCounts] = None) -> SectionCost:
    """Flag 1, then the clustered-tail code on the individual-sequence grids."""
    writer.write_bit(1)
    cost = encode_clustered(x, m, writer, counts, individual=True)
    cost.config += 1
    return cost


def encode_individual_plain(x: Sequence[int], writer: BitWriter,
                            counts: Optional[EmpiricalCounts] = None) -> SectionCost:
    """Flag 0, then the exact type code and the payload under the empirical counts.

    Raises:
        ValidationError: If the largest symbol is too large for a type code
    """
    counts = counts or empirical_counts(x)
    k_max = counts.k_max
    if k_max > MAX_ALPHABET:
        raise ValidationError(f"Largest symbol {k_max} is too large for the plain type code")
    cost = SectionCost()

    start = writer.bit_length
    writer.write_bit(0)
    writer.write_delta(k_max)
    cost.config = writer.bit_length - start

    start = writer.bit_length
    expected = 1
    for symbol in counts.symbols[:-1]:
        writer.write_unary_ones(symbol - expected)
        writer.write_delta(counts.counts[symbol] + 1)
        expected = symbol + 1
    writer.write_unary_ones(k_max - expected)
    cost.params = writer.bit_length - start

    table = count_table(((s - 1, counts.counts[s]) for s in counts.symbols), k_max)
    payload, cost.ideal_payload = code_direct(x, counts, table)
    cost.length_field = write_payload(writer, payload)
    cost.payload = payload.bit_length
    return cost


def _decode_plain(reader: BitReader, n: int) -> List[int]:
    k_max = reader.read_delta()
    if k_max > MAX_ALPHABET:
        raise CorruptStreamError(f"Largest symbol {k_max} is out of range")
    symbol_counts = []
    total = 0
    for index in range(k_max - 1):
        count = reader.read_delta() - 1
        if count:
            total += count
            if total >= n:
                raise CorruptStreamError("Type counts leave nothing for the largest symbol")
            symbol_counts.append((index, count))
    symbol_counts.append((k_max - 1, n - total))
    return decode_direct(read_payload(reader), count_table(symbol_counts, k_max), n)


def decode_individual(reader: BitReader, n: int) -> List[int]:
    """Inverse of either individual-sequence branch."""
    if reader.read_bit():
        return decode_clustered(reader, n, individual=True)
    return _decode_plain(reader, n)


def plain_lower_bound(counts: EmpiricalCounts, ideal: Optional[float] = None) -> float:
    """Bits the plain branch can never undercut (its header is exact)."""
    header = 1 + elias_delta_length(counts.k_max)
    absent = counts.k_max - len(counts.symbols)
    header += absent + sum(elias_delta_length(counts.counts[s] + 1) for s in counts.symbols[:-1])
    ideal = ml_description_length(counts) if ideal is None else ideal
    return header + payload_length_bits(ideal) + ideal - 1


def individual_candidates(x: Sequence[int], counts: EmpiricalCounts, m: Optional[int] = None,
                          exhaustive_limit: int = 64) -> List[Candidate]:
    """Plain branch plus the monotone branch for m (or every candidate m)."""
    ideal = ml_description_length(counts)
    n = counts.n
    candidates = [Candidate(
        config=CodecConfig(CodecMode.INDIVIDUAL, n, flag_monotone=False),
        lower_bound=plain_lower_bound(counts, ideal),
        encoder=lambda w: encode_individual_plain(x, w, counts),
    )]
    values = [m] if m is not None else effective_alphabet_candidates(counts, exhaustive_limit)
    for value in values:
        candidates.append(Candidate(
            config=CodecConfig(CodecMode.INDIVIDUAL, n, m=value, flag_monotone=True,
                               sigma_index=counts.tail_count(value)),
            lower_bound=1 + clustered_lower_bound(counts, value, individual=True, ideal=ideal),
            encoder=lambda w, value=value: encode_individual_monotone(x, value, w, counts),
        ))
    return candidates


def encode_individual(x: Sequence[int], writer: BitWriter,
                      counts: Optional[EmpiricalCounts] = None,
                      m: Optional[int] = None) -> SectionCost:
    """Write whichever branch is shorter for x.

    Args:
        x: Non-empty sequence
        writer: Destination stream
        counts: Precomputed counts of x
        m: Fix the effective alphabet of the monotone branch

    Returns:
        Bit accounting of the chosen branch
    """
    counts = counts or empirical_counts(x)
    if m is not None and (m < 2 or counts.head_count(m) == 0):
        raise ValidationError(f"m={m} must be >= 2 and cover at least one symbol")
    best = select_best(individual_candidates(x, counts, m))
    logger.debug(f"Individual-sequence branch: {best.config.label}")
    writer.extend(best.section)
    return best.cost
