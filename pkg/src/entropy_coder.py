"""Static-model arithmetic coding over integer frequency tables.

The coder keeps a 64-bit interval and renormalizes one bit at a time, carrying
straddling (E3) scalings as a pending-bit counter. With every frequency total
at most 2**30 the emitted length of a finished stream lies within two bits of
-sum(log2(f/total)).
"""
import math
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .bitio import BitReader, BitWriter
from .utils.exceptions import CorruptStreamError, InvalidInputError, ModelMismatchError
from .utils.logger import get_logger

logger = get_logger(__name__)

STATE_BITS = 64
FULL = 1 << STATE_BITS
MASK = FULL - 1
HALF = 1 << (STATE_BITS - 1)
QUARTER = 1 << (STATE_BITS - 2)
THREE_QUARTERS = HALF + QUARTER

FREQUENCY_BITS = 30
MAX_TOTAL = 1 << FREQUENCY_BITS


@dataclass(frozen=True)
class FrequencyTable:
    """Run-length integer frequency table.

    Symbols are 0-based indices. Run r covers ``run_lengths[r]`` consecutive
    symbols, each with frequency ``run_freqs[r]``. Plain per-symbol tables are
    runs of length one.
    """
    run_lengths: Tuple[int, ...]
    run_freqs: Tuple[int, ...]
    _starts: Tuple[int, ...] = field(init=False, repr=False, compare=False)
    _cums: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.run_lengths) != len(self.run_freqs):
            raise InvalidInputError("Run lengths and frequencies differ in size")
        if not self.run_lengths:
            raise InvalidInputError("Frequency table must contain at least one symbol")
        starts = [0]
        cums = [0]
        for length, freq in zip(self.run_lengths, self.run_freqs):
            if length < 1:
                raise InvalidInputError(f"Run length must be positive, got {length}")
            if freq < 0:
                raise InvalidInputError(f"Frequency must be non-negative, got {freq}")
            starts.append(starts[-1] + length)
            cums.append(cums[-1] + length * freq)
        if cums[-1] < 1:
            raise InvalidInputError("Frequency table total must be positive")
        if cums[-1] > MAX_TOTAL:
            raise InvalidInputError(
                f"Frequency total {cums[-1]} exceeds the coder limit 2**{FREQUENCY_BITS}"
            )
        object.__setattr__(self, '_starts', tuple(starts))
        object.__setattr__(self, '_cums', tuple(cums))

    @classmethod
    def from_frequencies(cls, frequencies: Sequence[int]) -> 'FrequencyTable':
        """Build a table from one frequency per symbol."""
        return cls.from_runs((1, f) for f in frequencies)

    @classmethod
    def from_runs(cls, runs: Iterable[Tuple[int, int]]) -> 'FrequencyTable':
        """Build a table from (run length, per-symbol frequency) pairs.

        Adjacent runs with equal frequencies are merged.
        """
        lengths: List[int] = []
        freqs: List[int] = []
        for length, freq in runs:
            if freqs and freqs[-1] == freq:
                lengths[-1] += length
            else:
                lengths.append(length)
                freqs.append(freq)
        return cls(tuple(lengths), tuple(freqs))

    @property
    def symbol_count(self) -> int:
        return self._starts[-1]

    @property
    def total(self) -> int:
        return self._cums[-1]

    @property
    def cumulative_frequencies(self) -> List[int]:
        """Dense cumulative frequencies (length symbol_count + 1)."""
        out = [0]
        for length, freq in zip(self.run_lengths, self.run_freqs):
            for _ in range(length):
                out.append(out[-1] + freq)
        return out

    def frequency(self, symbol: int) -> int:
        if not 0 <= symbol < self.symbol_count:
            return 0
        return self.run_freqs[bisect_right(self._starts, symbol) - 1]

    def bounds(self, symbol: int) -> Tuple[int, int]:
        """Cumulative interval [low, high) of a symbol."""
        if not 0 <= symbol < self.symbol_count:
            raise ModelMismatchError(
                f"Symbol index {symbol} is outside a table of {self.symbol_count} symbols"
            )
        run = bisect_right(self._starts, symbol) - 1
        freq = self.run_freqs[run]
        low = self._cums[run] + (symbol - self._starts[run]) * freq
        return low, low + freq

    def locate(self, target: int) -> Tuple[int, int, int]:
        """Find the symbol whose interval contains target; returns (symbol, low, high)."""
        # Zero-frequency runs share their cumulative value with the next run,
        # so bisect_right never lands on them.
        run = bisect_right(self._cums, target) - 1
        freq = self.run_freqs[run]
        offset = (target - self._cums[run]) // freq
        low = self._cums[run] + offset * freq
        return self._starts[run] + offset, low, low + freq


class ArithmeticEncoder:
    """Streaming encoder; consecutive symbols may use different tables."""

    def __init__(self, writer: BitWriter):
        self._writer = writer
        self._low = 0
        self._high = MASK
        self._pending = 0

    def _emit(self, bit: int) -> None:
        self._writer.write_bit(bit)
        if self._pending:
            if bit:
                self._writer.write_fixed(0, self._pending)
            else:
                self._writer.write_unary_ones(self._pending)
            self._pending = 0

    def encode(self, symbol: int, table: FrequencyTable) -> None:
        """Narrow the interval to `symbol` under `table`.

        Raises:
            ModelMismatchError: If the symbol has zero frequency
        """
        cum_low, cum_high = table.bounds(symbol)
        if cum_low == cum_high:
            raise ModelMismatchError(f"Symbol {symbol} has zero frequency in the coding table")
        total = table.total
        span = self._high - self._low + 1
        self._high = self._low + span * cum_high // total - 1
        self._low = self._low + span * cum_low // total

        while True:
            if self._high < HALF:
                self._emit(0)
            elif self._low >= HALF:
                self._emit(1)
                self._low -= HALF
                self._high -= HALF
            elif self._low >= QUARTER and self._high < THREE_QUARTERS:
                self._pending += 1
                self._low -= QUARTER
                self._high -= QUARTER
            else:
                break
            self._low <<= 1
            self._high = (self._high << 1) | 1

    def finish(self) -> None:
        """Emit the two disambiguating bits; any bits may follow them."""
        if self._low == 0 and self._high == MASK:
            return
        self._pending += 1
        self._emit(0 if self._low < QUARTER else 1)


class ArithmeticDecoder:
    """Streaming decoder mirroring ArithmeticEncoder."""

    def __init__(self, reader: BitReader):
        self._reader = reader
        self._low = 0
        self._high = MASK
        self._value = reader.read_fixed(STATE_BITS)

    def decode(self, table: FrequencyTable) -> int:
        """Decode one symbol under `table`.

        Raises:
            CorruptStreamError: If the code value falls outside the current interval
        """
        total = table.total
        span = self._high - self._low + 1
        offset = self._value - self._low
        if offset < 0 or offset >= span:
            raise CorruptStreamError("Arithmetic code value left the coding interval")
        target = ((offset + 1) * total - 1) // span
        symbol, cum_low, cum_high = table.locate(target)

        self._high = self._low + span * cum_high // total - 1
        self._low = self._low + span * cum_low // total

        read_bit = self._reader.read_bit
        while True:
            if self._high < HALF:
                pass
            elif self._low >= HALF:
                self._low -= HALF
                self._high -= HALF
                self._value -= HALF
            elif self._low >= QUARTER and self._high < THREE_QUARTERS:
                self._low -= QUARTER
                self._high -= QUARTER
                self._value -= QUARTER
            else:
                break
            self._low <<= 1
            self._high = (self._high << 1) | 1
            self._value = (self._value << 1) | read_bit()
        return symbol


def ac_encode(symbols: Iterable[int], table: FrequencyTable) -> BitWriter:
    """Encode a whole symbol sequence under one table.

    Args:
        symbols: 0-based symbol indices
        table: Static frequency table

    Returns:
        BitWriter holding the finished code (empty for zero-information input)
    """
    writer = BitWriter()
    encoder = ArithmeticEncoder(writer)
    for symbol in symbols:
        encoder.encode(symbol, table)
    encoder.finish()
    return writer


def ac_decode(bits: Union[BitWriter, bytes], table: FrequencyTable, length: int,
              bit_length: Optional[int] = None) -> List[int]:
    """Decode `length` symbols produced by ac_encode under the same table."""
    if length == 0:
        return []
    if isinstance(bits, BitWriter):
        bit_length = bits.bit_length
        bits = bits.getvalue()
    if bit_length is None:
        bit_length = len(bits) * 8
    reader = BitReader(bits, limit=bit_length, zero_fill=True)
    decoder = ArithmeticDecoder(reader)
    return [decoder.decode(table) for _ in range(length)]


def ideal_code_length_from_counts(counts: Dict[int, int], table: FrequencyTable) -> float:
    """-sum(c_s * log2(f_s / total)) for symbol counts c_s.

    Returns math.inf when a counted symbol has zero frequency.
    """
    log_total = math.log2(table.total)
    terms = []
    for symbol, count in counts.items():
        if count == 0:
            continue
        freq = table.frequency(symbol)
        if freq == 0:
            return math.inf
        terms.append(count * (log_total - math.log2(freq)))
    return math.fsum(terms)


def ideal_code_length(symbols: Iterable[int], table: FrequencyTable) -> float:
    """Ideal code length in bits of a symbol sequence under a table.

    Raises:
        ModelMismatchError: If a symbol has zero frequency
    """
    length = ideal_code_length_from_counts(Counter(symbols), table)
    if math.isinf(length):
        raise ModelMismatchError("Sequence contains a zero-frequency symbol")
    return length
