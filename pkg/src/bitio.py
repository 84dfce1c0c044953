"""Bit-level streams and the Elias gamma/delta codes.

Bits are written MSB-first within each byte. A finished stream is padded with
zero bits up to the next byte boundary; the container records the exact number
of meaningful bits so the padding is never interpreted.
"""
from typing import Optional

from .utils.exceptions import BudgetExceededError, InvalidInputError, TruncatedStreamError

# Longest single run accepted by write_unary_ones; anything larger is a caller bug.
MAX_UNARY_RUN = 2 ** 34


def ceil_log2(value: int) -> int:
    """Return ⌈log2 value⌉ for value >= 1 (0 for value == 1)."""
    if value < 1:
        raise InvalidInputError(f"ceil_log2 requires a positive integer, got {value}")
    return (value - 1).bit_length()


def elias_gamma_length(i: int) -> int:
    """Length in bits of the Elias gamma codeword for i."""
    if i < 1:
        raise InvalidInputError(f"Elias codes only support positive integers, got {i}")
    return 2 * (i.bit_length() - 1) + 1


def elias_delta_length(i: int) -> int:
    """Length in bits of the Elias delta codeword for i."""
    if i < 1:
        raise InvalidInputError(f"Elias codes only support positive integers, got {i}")
    width = i.bit_length()
    return elias_gamma_length(width) + width - 1


class BitWriter:
    """Append-only bit sink."""

    def __init__(self):
        self._buffer = bytearray()
        self._acc = 0
        self._acc_bits = 0

    @property
    def bit_length(self) -> int:
        """Number of bits written so far."""
        return len(self._buffer) * 8 + self._acc_bits

    def _drain(self) -> None:
        if self._acc_bits < 8:
            return
        whole = self._acc_bits >> 3
        rest = self._acc_bits & 7
        self._buffer += (self._acc >> rest).to_bytes(whole, 'big')
        self._acc &= (1 << rest) - 1
        self._acc_bits = rest

    def write_bit(self, bit: int) -> None:
        self._acc = (self._acc << 1) | (1 if bit else 0)
        self._acc_bits += 1
        if self._acc_bits == 8:
            self._buffer.append(self._acc)
            self._acc = 0
            self._acc_bits = 0

    def write_fixed(self, value: int, width: int) -> None:
        """Write value using exactly `width` bits.

        Raises:
            InvalidInputError: If value is negative or does not fit in width bits
        """
        if width < 0:
            raise InvalidInputError(f"Field width must be non-negative, got {width}")
        if value < 0 or value >> width:
            raise InvalidInputError(f"Value {value} does not fit in {width} bits")
        if width == 0:
            return
        self._acc = (self._acc << width) | value
        self._acc_bits += width
        self._drain()

    def write_unary_ones(self, count: int) -> None:
        """Write `count` one bits (a run of delta(1) or gamma(1) codewords)."""
        if count < 0:
            raise InvalidInputError(f"Run length must be non-negative, got {count}")
        if count > MAX_UNARY_RUN:
            raise BudgetExceededError(f"Run of {count} one bits is too long to write")
        while count:
            chunk = min(count, 4096)
            self.write_fixed((1 << chunk) - 1, chunk)
            count -= chunk

    def write_gamma(self, i: int) -> None:
        """Write the Elias gamma codeword of i >= 1."""
        if i < 1:
            raise InvalidInputError(f"Elias gamma requires i >= 1, got {i}")
        # ⌊log2 i⌋ zeros followed by i itself is i written in 2⌊log2 i⌋+1 bits.
        self.write_fixed(i, 2 * i.bit_length() - 1)

    def write_delta(self, i: int) -> None:
        """Write the Elias delta codeword of i >= 1."""
        if i < 1:
            raise InvalidInputError(f"Elias delta requires i >= 1, got {i}")
        width = i.bit_length()
        self.write_gamma(width)
        self.write_fixed(i & ((1 << (width - 1)) - 1), width - 1)

    def write_bitstring(self, bits: str) -> None:
        """Write a string of '0'/'1' characters."""
        for ch in bits:
            if ch not in '01':
                raise InvalidInputError(f"Invalid bit character: {ch!r}")
            self.write_bit(ch == '1')

    def extend(self, other: 'BitWriter') -> None:
        """Append every bit written to `other`."""
        if other._buffer:
            if self._acc_bits == 0:
                self._buffer += other._buffer
            else:
                self.write_fixed(int.from_bytes(other._buffer, 'big'), len(other._buffer) * 8)
        if other._acc_bits:
            self.write_fixed(other._acc, other._acc_bits)

    def getvalue(self) -> bytes:
        """Return the written bits, zero-padded to a whole number of bytes."""
        if self._acc_bits == 0:
            return bytes(self._buffer)
        return bytes(self._buffer) + bytes([self._acc << (8 - self._acc_bits)])

    def to_bitstring(self) -> str:
        """Return the written bits as a '0'/'1' string (no padding)."""
        if self.bit_length == 0:
            return ''
        value = int.from_bytes(self.getvalue(), 'big')
        padded = len(self.getvalue()) * 8
        return format(value, f'0{padded}b')[:self.bit_length]


class BitReader:
    """Sequential bit source over a byte string.

    A reader created with ``zero_fill=True`` returns zero bits past its limit
    instead of raising; the arithmetic decoder relies on this for the bits that
    follow the final flush.
    """

    def __init__(self, data: bytes, start: int = 0, limit: Optional[int] = None,
                 zero_fill: bool = False):
        self._data = bytes(data)
        total = len(self._data) * 8
        self._limit = total if limit is None else min(limit, total)
        self._virtual_limit = total if limit is None else limit
        self._pos = start
        self._zero_fill = zero_fill

    @classmethod
    def from_bitstring(cls, bits: str) -> 'BitReader':
        """Build a reader over an exact '0'/'1' string."""
        writer = BitWriter()
        writer.write_bitstring(bits)
        return cls(writer.getvalue(), limit=writer.bit_length)

    @property
    def position(self) -> int:
        """Number of bits consumed so far."""
        return self._pos

    @property
    def remaining(self) -> int:
        """Bits left before the reader's limit."""
        return max(0, self._virtual_limit - self._pos)

    def read_bit(self) -> int:
        pos = self._pos
        if pos >= self._limit:
            if not self._zero_fill:
                raise TruncatedStreamError("Bit stream ended unexpectedly")
            self._pos = pos + 1
            return 0
        self._pos = pos + 1
        return (self._data[pos >> 3] >> (7 - (pos & 7))) & 1

    def read_fixed(self, width: int) -> int:
        """Read an unsigned integer stored in exactly `width` bits."""
        if width < 0:
            raise InvalidInputError(f"Field width must be non-negative, got {width}")
        if width == 0:
            return 0
        pos = self._pos
        available = self._limit - pos
        if available >= width:
            first = pos >> 3
            last = (pos + width + 7) >> 3
            chunk = int.from_bytes(self._data[first:last], 'big')
            shift = (last - first) * 8 - (pos & 7) - width
            self._pos = pos + width
            return (chunk >> shift) & ((1 << width) - 1)
        if not self._zero_fill:
            raise TruncatedStreamError(
                f"Bit stream ended unexpectedly: needed {width} bits, {max(available, 0)} left"
            )
        head = max(available, 0)
        value = self.read_fixed(head) if head else 0
        self._pos = pos + width
        return value << (width - head)

    def read_gamma(self) -> int:
        """Read one Elias gamma codeword."""
        zeros = 0
        while self.read_bit() == 0:
            zeros += 1
            if zeros > 4096:
                raise TruncatedStreamError("Elias gamma prefix longer than any valid codeword")
        return (1 << zeros) | self.read_fixed(zeros)

    def read_delta(self) -> int:
        """Read one Elias delta codeword."""
        width = self.read_gamma()
        return (1 << (width - 1)) | self.read_fixed(width - 1)

    def skip(self, count: int) -> None:
        """Advance past `count` bits that must exist."""
        if count > self._limit - self._pos:
            raise TruncatedStreamError(
                f"Bit stream ended unexpectedly: needed {count} bits, {self._limit - self._pos} left"
            )
        self._pos += count

    def sub_reader(self, bit_count: int) -> 'BitReader':
        """Reader over the next `bit_count` bits that yields zeros past its end.

        The parent reader is not advanced; call skip() afterwards.
        """
        return BitReader(self._data, start=self._pos, limit=self._pos + bit_count,
                         zero_fill=True)


def elias_gamma_encode(i: int) -> str:
    """Return the Elias gamma codeword of i as a bit string."""
    writer = BitWriter()
    writer.write_gamma(i)
    return writer.to_bitstring()


def elias_delta_encode(i: int) -> str:
    """Return the Elias delta codeword of i as a bit string."""
    writer = BitWriter()
    writer.write_delta(i)
    return writer.to_bitstring()


def elias_gamma_decode(reader: BitReader) -> int:
    """Decode one gamma codeword from reader."""
    return reader.read_gamma()


def elias_delta_decode(reader: BitReader) -> int:
    """Decode one delta codeword from reader."""
    return reader.read_delta()
