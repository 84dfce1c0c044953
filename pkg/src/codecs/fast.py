"""Effective-alphabet code with a clustered tail.

Symbols 1..m are modelled by a quantized monotone vector; every larger symbol
is folded into a single TAIL symbol whose mass is the exact tail fraction
n_x(x > m)/n. The header lists each distinct tail symbol with its count, so a
second coding pass can send which tail symbol each TAIL occurrence was under
the exact within-tail frequencies.

Layout after the mode field: delta(m), the tail occurrence count, the support
(differential scheme only), the parameters, then, when the tail is not empty,
the number of distinct tail symbols and the tail list, and finally the
length-prefixed payload.
"""
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..bitio import BitReader, BitWriter, ceil_log2, elias_delta_length, elias_gamma_length
from ..entropy_coder import (
    ArithmeticDecoder,
    ArithmeticEncoder,
    FrequencyTable,
    ideal_code_length_from_counts,
)
from ..estimators import EmpiricalCounts, empirical_counts, ml_description_length, pava_blocks
from ..grids import Grid, GridMode, GridSpec, QuantizedParams, build_grid, quantize_runs
from ..param_codec import (
    ParamScheme,
    decode_params_counts,
    decode_params_differential,
    encode_params,
)
from ..utils.exceptions import CorruptStreamError, ValidationError
from .base import (
    SectionCost,
    frequency_table,
    grid_length,
    payload_length_bits,
    read_payload,
    write_payload,
)


def clustered_grid(n: int, m: int, individual: bool = False) -> Tuple[Grid, ParamScheme]:
    """Grid and parameter scheme for effective alphabet m.

    With m^3 <= n the head is a small alphabet and uses the SMALL_K grid of
    size m with the differential code. Otherwise the average-case code uses
    the FAST grid and the individual-sequence code uses IND_SMALL (m^2 <= n)
    or IND_LARGE, all with the counts code.
    """
    n = grid_length(n)
    if m ** 3 <= n:
        return build_grid(GridSpec(GridMode.SMALL_K, n, m)), ParamScheme.DIFFERENTIAL
    if not individual:
        mode = GridMode.FAST
    elif m * m <= n:
        mode = GridMode.IND_SMALL
    else:
        mode = GridMode.IND_LARGE
    return build_grid(GridSpec(mode, n, m)), ParamScheme.COUNTS


def fit_clustered(counts: EmpiricalCounts, m: int, grid: Grid) -> QuantizedParams:
    """Quantize the monotone ML of the head with the tail mass reserved."""
    n = counts.n
    runs = [(block.value(n), block.length) for block in pava_blocks(counts, upto=m)]
    return quantize_runs(runs, grid, reserved=Fraction(counts.tail_count(m), n))


def _head_table(qp: QuantizedParams) -> FrequencyTable:
    value_runs = list(qp.value_runs())
    if qp.reserved:
        value_runs.append((qp.reserved, 1))
    return frequency_table(value_runs)


def encode_clustered(x: Sequence[int], m: int, writer: BitWriter,
                     counts: Optional[EmpiricalCounts] = None,
                     individual: bool = False) -> SectionCost:
    """Write an effective-alphabet section for m.

    Raises:
        ValidationError: If m < 2 or no symbol is <= m
        QuantizationError: If the head cannot be quantized monotonically
    """
    counts = counts or empirical_counts(x)
    n = counts.n
    if m < 2:
        raise ValidationError(f"The effective alphabet needs m >= 2, got {m}")
    if counts.head_count(m) == 0:
        raise ValidationError(f"No symbol is <= m={m}; choose a larger effective alphabet")

    grid, scheme = clustered_grid(n, m, individual)
    qp = fit_clustered(counts, m, grid)
    n_tail = counts.tail_count(m)
    tail = counts.tail_symbols(m)
    width = ceil_log2(n + 1)
    cost = SectionCost()

    start = writer.bit_length
    writer.write_delta(m)
    writer.write_fixed(n_tail, width)
    if scheme is ParamScheme.DIFFERENTIAL:
        writer.write_fixed(qp.support - 1, ceil_log2(m))
    cost.config = writer.bit_length - start
    cost.params = encode_params(qp, scheme, writer)

    if n_tail:
        start = writer.bit_length
        writer.write_fixed(len(tail), width)
        cost.config += writer.bit_length - start
        start = writer.bit_length
        count_width = ceil_log2(n)
        for symbol, count in tail:
            writer.write_gamma(symbol)
            writer.write_fixed(count - 1, count_width)
        cost.tail = writer.bit_length - start

    head_table = _head_table(qp)
    tail_index = qp.support
    position: Dict[int, int] = {symbol: i for i, (symbol, _) in enumerate(tail)}
    payload = BitWriter()
    encoder = ArithmeticEncoder(payload)
    for symbol in x:
        encoder.encode(symbol - 1 if symbol <= m else tail_index, head_table)
    if n_tail:
        tail_table = FrequencyTable.from_frequencies([count for _, count in tail])
        for symbol in x:
            if symbol > m:
                encoder.encode(position[symbol], tail_table)
        cost.ideal_payload = ideal_code_length_from_counts(
            {i: count for i, (_, count) in enumerate(tail)}, tail_table
        )
    encoder.finish()

    head_counts = {symbol - 1: count for symbol, count in counts.counts.items() if symbol <= m}
    if n_tail:
        head_counts[tail_index] = n_tail
    cost.ideal_payload += ideal_code_length_from_counts(head_counts, head_table)
    cost.length_field = write_payload(writer, payload)
    cost.payload = payload.bit_length
    return cost


def decode_clustered(reader: BitReader, n: int, individual: bool = False) -> List[int]:
    """Inverse of encode_clustered.

    Raises:
        CorruptStreamError: If the header fields or decoded symbols are inconsistent
    """
    m = reader.read_delta()
    if m < 2:
        raise CorruptStreamError(f"Effective alphabet m={m} is below 2")
    width = ceil_log2(n + 1)
    n_tail = reader.read_fixed(width)
    if n_tail >= n:
        raise CorruptStreamError(f"Tail count {n_tail} leaves no head symbols out of n={n}")

    grid, scheme = clustered_grid(n, m, individual)
    reserved = Fraction(n_tail, n)
    if scheme is ParamScheme.DIFFERENTIAL:
        support = reader.read_fixed(ceil_log2(m)) + 1
        qp = decode_params_differential(reader, grid, support, reserved)
    else:
        qp = decode_params_counts(reader, grid, reserved, max_support=m)

    tail: List[Tuple[int, int]] = []
    if n_tail:
        distinct = reader.read_fixed(width)
        if not 1 <= distinct <= n_tail:
            raise CorruptStreamError(f"Invalid number of distinct tail symbols: {distinct}")
        count_width = ceil_log2(n)
        previous = m
        for _ in range(distinct):
            symbol = reader.read_gamma()
            if symbol <= previous:
                raise CorruptStreamError("Tail symbols must be increasing and larger than m")
            tail.append((symbol, reader.read_fixed(count_width) + 1))
            previous = symbol
        if sum(count for _, count in tail) != n_tail:
            raise CorruptStreamError("Tail counts do not add up to the tail occurrence count")

    head_table = _head_table(qp)
    tail_index = qp.support
    decoder = ArithmeticDecoder(read_payload(reader))
    head = [decoder.decode(head_table) for _ in range(n)]
    if not n_tail:
        return [symbol + 1 for symbol in head]
    if head.count(tail_index) != n_tail:
        raise CorruptStreamError("Decoded tail occurrences disagree with the header")
    tail_table = FrequencyTable.from_frequencies([count for _, count in tail])
    return [tail[decoder.decode(tail_table)][0] if symbol == tail_index else symbol + 1
            for symbol in head]


def clustered_lower_bound(counts: EmpiricalCounts, m: int, individual: bool = False,
                          ideal: Optional[float] = None) -> float:
    """Bits encode_clustered can never undercut for this m.

    The payload of both passes together costs at least the unconstrained ML
    description length of the sequence.
    """
    n = counts.n
    grid, scheme = clustered_grid(n, m, individual)
    width = ceil_log2(n + 1)
    n_tail = counts.tail_count(m)
    bits = elias_delta_length(m) + width
    if scheme is ParamScheme.DIFFERENTIAL:
        bits += ceil_log2(m) + counts.largest_at_most(m) - 1
    else:
        bits += grid.B
    if n_tail:
        count_width = ceil_log2(n)
        bits += width + sum(elias_gamma_length(symbol) + count_width
                            for symbol, _ in counts.tail_symbols(m))
    ideal = ml_description_length(counts) if ideal is None else ideal
    return bits + payload_length_bits(ideal) + ideal - 1


def encode_fast(x: Sequence[int], m: int, writer: BitWriter,
                counts: Optional[EmpiricalCounts] = None) -> SectionCost:
    """Average-case effective-alphabet code (see encode_clustered)."""
    return encode_clustered(x, m, writer, counts)


def decode_fast(reader: BitReader, n: int) -> List[int]:
    return decode_clustered(reader, n)


def effective_alphabet_candidates(counts: EmpiricalCounts, exhaustive_limit: int = 64) -> List[int]:
    """Values of m worth trying: powers of two up to k_max, k_max itself and ceil(log2 n).

    When k_max <= exhaustive_limit every m in 2..k_max is tried. Values that
    leave no symbol in the head are dropped.
    """
    k_max = counts.k_max
    values = {1 << j for j in range(1, k_max.bit_length())}
    values.update((2, k_max, ceil_log2(counts.n)))
    if k_max <= exhaustive_limit:
        values.update(range(2, k_max + 1))
    return sorted(m for m in values if m >= 2 and counts.head_count(m) > 0)
