"""Self-describing container around a mode section.

Layout: magic "MONO1", version byte, delta(n), 2-bit mode, the mode section
(fields, parameters, length-prefixed payload) and zero padding to a byte
boundary.
"""
from typing import Callable, Dict, List, Tuple

from ..bitio import BitReader, BitWriter, elias_delta_length
from ..utils.exceptions import ContainerFormatError, CorruptStreamError
from ..utils.validation import MAX_SEQUENCE_LENGTH
from .base import CodecMode, CostBreakdown, SectionCost
from .fast import decode_fast
from .individual import decode_individual
from .large import decode_large
from .small import decode_small

MAGIC = b"MONO1"
FORMAT_VERSION = 0x01
MODE_BITS = 2
PREAMBLE_BITS = (len(MAGIC) + 1) * 8

_DECODERS: Dict[CodecMode, Callable[[BitReader, int], List[int]]] = {
    CodecMode.SMALL_K: decode_small,
    CodecMode.LARGE: decode_large,
    CodecMode.FAST: decode_fast,
    CodecMode.INDIVIDUAL: decode_individual,
}


def header_bits(n: int) -> int:
    """Size of the magic, version, length and mode fields."""
    return PREAMBLE_BITS + elias_delta_length(n) + MODE_BITS


def write_container(n: int, mode: CodecMode, section: BitWriter,
                    cost: SectionCost) -> Tuple[bytes, CostBreakdown]:
    """Assemble the container bytes and their bit accounting."""
    writer = BitWriter()
    writer.write_fixed(int.from_bytes(MAGIC + bytes([FORMAT_VERSION]), 'big'), PREAMBLE_BITS)
    writer.write_delta(n)
    writer.write_fixed(int(mode), MODE_BITS)
    header = writer.bit_length
    writer.extend(section)
    data = writer.getvalue()
    breakdown = CostBreakdown(
        header=header,
        config=cost.config,
        params=cost.params,
        tail=cost.tail,
        length_field=cost.length_field,
        payload=cost.payload,
        padding=len(data) * 8 - writer.bit_length,
        ideal_payload=cost.ideal_payload,
    )
    return data, breakdown


def read_header(data: bytes) -> Tuple[BitReader, int, CodecMode]:
    """Validate the preamble and read n and the mode.

    Raises:
        ContainerFormatError: If the magic or version does not match
        TruncatedStreamError: If the header is cut short
    """
    data = bytes(data)
    if data[:len(MAGIC)] != MAGIC:
        raise ContainerFormatError("Not a monotone-codec container (bad magic)")
    if len(data) <= len(MAGIC):
        raise ContainerFormatError("Container ends before the version byte")
    if data[len(MAGIC)] != FORMAT_VERSION:
        raise ContainerFormatError(
            f"Unsupported container version {data[len(MAGIC)]} (expected {FORMAT_VERSION})"
        )
    reader = BitReader(data, start=PREAMBLE_BITS)
    n = reader.read_delta()
    if n > MAX_SEQUENCE_LENGTH:
        raise CorruptStreamError(f"Sequence length {n} is out of range")
    mode = CodecMode(reader.read_fixed(MODE_BITS))
    return reader, n, mode


def decode(data: bytes) -> List[int]:
    """Reconstruct the sequence stored in a container.

    Raises:
        ContainerFormatError: If the magic or version does not match
        TruncatedStreamError: If the data ends early
        CorruptStreamError: If the contents are inconsistent
    """
    reader, n, mode = read_header(data)
    x = _DECODERS[mode](reader, n)
    if reader.remaining >= 8:
        raise CorruptStreamError(f"{reader.remaining} unexpected bits after the payload")
    return x
