"""Types and helpers shared by every codec mode."""
import math
from dataclasses import asdict, dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from ..bitio import BitReader, BitWriter, elias_delta_length
from ..entropy_coder import (
    MAX_TOTAL,
    ArithmeticDecoder,
    ArithmeticEncoder,
    FrequencyTable,
    ideal_code_length_from_counts,
)
from ..estimators import EmpiricalCounts, pava_blocks
from ..grids import DEFAULT_ALPHA, Grid, QuantizedParams, quantize_runs
from ..utils.exceptions import (
    BudgetExceededError,
    InvalidInputError,
    QuantizationError,
    TruncatedStreamError,
    ValidationError,
)
from ..utils.logger import get_logger

logger = get_logger(__name__)

# Every coded symbol needs a frequency of at least one out of MAX_TOTAL.
MAX_ALPHABET = MAX_TOTAL // 2


class CodecMode(IntEnum):
    """Container modes; the value is the 2-bit mode field."""
    SMALL_K = 0
    LARGE = 1
    FAST = 2
    INDIVIDUAL = 3


@dataclass(frozen=True)
class CodecConfig:
    """A fully determined coding configuration.

    Attributes:
        mode: Container mode
        n: Sequence length
        k_hat: Alphabet size announced by SMALL_K
        m: Effective alphabet of FAST and the monotone INDIVIDUAL branch
        alpha: Grid exponent of the large-alphabet grids
        flag_monotone: INDIVIDUAL branch selector
        sigma_index: Number of clustered tail occurrences (FAST and monotone INDIVIDUAL)
    """
    mode: CodecMode
    n: int
    k_hat: Optional[int] = None
    m: Optional[int] = None
    alpha: Fraction = DEFAULT_ALPHA
    flag_monotone: Optional[bool] = None
    sigma_index: Optional[int] = None

    @property
    def rho(self) -> Optional[float]:
        if self.m is None or self.n < 2:
            return None
        return math.log2(self.m) / math.log2(self.n)

    @property
    def label(self) -> str:
        """Short human label such as "FAST/m=16"."""
        if self.mode is CodecMode.SMALL_K:
            return f"SMALL_K/k={self.k_hat}"
        if self.mode is CodecMode.LARGE:
            return "LARGE"
        if self.mode is CodecMode.FAST:
            return f"FAST/m={self.m}"
        if self.flag_monotone:
            return f"INDIVIDUAL/monotone/m={self.m}"
        return "INDIVIDUAL/plain"

    @property
    def sort_key(self) -> Tuple[int, int]:
        """Tie-break order: smaller mode ordinal, then smaller alphabet parameter."""
        return int(self.mode), self.m or self.k_hat or 0


@dataclass
class SectionCost:
    """Bits spent by a mode encoder after the common header."""
    config: int = 0
    params: int = 0
    tail: int = 0
    length_field: int = 0
    payload: int = 0
    ideal_payload: float = 0.0

    @property
    def total(self) -> int:
        return self.config + self.params + self.tail + self.length_field + self.payload


@dataclass
class CostBreakdown:
    """Bit accounting of a finished container."""
    header: int
    config: int
    params: int
    tail: int
    length_field: int
    payload: int
    padding: int
    ideal_payload: float

    @property
    def total(self) -> int:
        """Meaningful bits, padding excluded."""
        return (self.header + self.config + self.params + self.tail
                + self.length_field + self.payload)

    @property
    def overhead(self) -> float:
        """Bits spent beyond the ideal payload."""
        return self.total - self.ideal_payload

    def to_dict(self) -> Dict[str, float]:
        data = asdict(self)
        data['total'] = self.total
        return data


def grid_length(n: int) -> int:
    """Sequence length used to build grids; length-one sequences share the n=2 grids."""
    return max(n, 2)


def frequency_table(value_runs: Sequence[Tuple[Fraction, int]]) -> FrequencyTable:
    """Integer coder table from exact probability runs.

    Each of the s symbols gets max(1, floor(p * (2^30 - s))), so the total
    never exceeds 2^30 as long as the probabilities sum to at most one.

    Raises:
        InvalidInputError: If the alphabet is too large for the coder
    """
    symbols = sum(count for _, count in value_runs)
    if symbols > MAX_ALPHABET:
        raise InvalidInputError(f"Alphabet of {symbols} symbols exceeds the coder limit {MAX_ALPHABET}")
    scale = MAX_TOTAL - symbols
    return FrequencyTable.from_runs(
        (count, max(1, value.numerator * scale // value.denominator)) for value, count in value_runs
    )


def count_table(symbol_counts: Iterable[Tuple[int, int]], alphabet: int) -> FrequencyTable:
    """Table over 0-based symbols 0..alphabet-1 with the given exact counts (others zero)."""
    runs = []
    expected = 0
    for symbol, count in symbol_counts:
        if symbol > expected:
            runs.append((symbol - expected, 0))
        runs.append((1, count))
        expected = symbol + 1
    if alphabet > expected:
        runs.append((alphabet - expected, 0))
    return FrequencyTable.from_runs(runs)


def write_payload(writer: BitWriter, payload: BitWriter) -> int:
    """Append delta(payload bits + 1) and the payload; returns the length-field size."""
    start = writer.bit_length
    writer.write_delta(payload.bit_length + 1)
    length_bits = writer.bit_length - start
    writer.extend(payload)
    return length_bits


def read_payload(reader: BitReader) -> BitReader:
    """Consume a length-prefixed payload and return a zero-filled reader over it.

    Raises:
        TruncatedStreamError: If fewer payload bits remain than announced
    """
    bits = reader.read_delta() - 1
    if bits > reader.remaining:
        raise TruncatedStreamError(
            f"Payload announces {bits} bits but only {reader.remaining} remain"
        )
    payload = reader.sub_reader(bits)
    reader.skip(bits)
    return payload


def payload_length_bits(payload_bits: float) -> int:
    """Lower bound on the size of the payload length field."""
    return elias_delta_length(max(1, int(payload_bits)))


def fit_monotone(counts: EmpiricalCounts, grid: Grid) -> QuantizedParams:
    """Quantized monotone ML over symbols 1..k_max."""
    runs = [(block.value(counts.n), block.length) for block in pava_blocks(counts)]
    return quantize_runs(runs, grid)


def code_direct(x: Sequence[int], counts: EmpiricalCounts, table: FrequencyTable
                ) -> Tuple[BitWriter, float]:
    """Arithmetic-code symbols x-1 under table.

    Returns:
        Payload writer and its ideal length
    """
    payload = BitWriter()
    encoder = ArithmeticEncoder(payload)
    for symbol in x:
        encoder.encode(symbol - 1, table)
    encoder.finish()
    ideal = ideal_code_length_from_counts({s - 1: c for s, c in counts.counts.items()}, table)
    return payload, ideal


def decode_direct(reader: BitReader, table: FrequencyTable, n: int) -> List[int]:
    """Inverse of code_direct."""
    decoder = ArithmeticDecoder(reader)
    return [decoder.decode(table) + 1 for _ in range(n)]


@dataclass
class Candidate:
    """A configuration with a cheap lower bound and a deferred exact encoding."""
    config: CodecConfig
    lower_bound: float
    encoder: Callable[[BitWriter], SectionCost]
    section: Optional[BitWriter] = None
    cost: Optional[SectionCost] = None

    def evaluate(self) -> SectionCost:
        """Encode into a private stream and remember the exact cost."""
        writer = BitWriter()
        self.cost = self.encoder(writer)
        self.section = writer
        return self.cost


def select_best(candidates: Iterable[Candidate]) -> Candidate:
    """Exact argmin over candidates, skipping those whose lower bound cannot win.

    Candidates are encoded in lower-bound order until the next bound exceeds
    the best exact length found. Ties go to the smaller mode, then the smaller
    alphabet parameter.

    Raises:
        ValidationError: If no candidate can code the sequence
    """
    best: Optional[Candidate] = None
    for candidate in sorted(candidates, key=lambda c: (c.lower_bound, c.config.sort_key)):
        if best is not None and candidate.lower_bound > best.cost.total:
            break
        try:
            cost = candidate.evaluate()
        except (QuantizationError, ValidationError, InvalidInputError, BudgetExceededError) as e:
            logger.debug(f"{candidate.config.label}: infeasible ({e})")
            continue
        logger.debug(f"{candidate.config.label}: {cost.total} bits "
                     f"(lower bound {candidate.lower_bound:.1f})")
        if best is None or (cost.total, candidate.config.sort_key) < (best.cost.total, best.config.sort_key):
            best = candidate
    if best is None:
        raise ValidationError("No codec configuration can represent this sequence")
    return best
