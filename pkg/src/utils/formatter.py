"""Sequence file formats: whitespace-separated text and LEB128 varints."""
import re
from pathlib import Path
from typing import List, Sequence

from .exceptions import InvalidInputError, ValidationError

FORMATS = ('text', 'varint')

_TOKEN = re.compile(r'\S+')


def parse_text_sequence(text: str) -> List[int]:
    """Parse whitespace-separated positive integers.

    Args:
        text: File contents

    Returns:
        Parsed symbols (empty for a blank file)

    Raises:
        InvalidInputError: If a token is not a positive decimal integer, with its line and column
    """
    symbols = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        for match in _TOKEN.finditer(line):
            token = match.group()
            if not token.isdigit() or int(token) < 1:
                raise InvalidInputError(
                    f"line {line_number}, column {match.start() + 1}: "
                    f"expected a positive integer, got {token!r}"
                )
            symbols.append(int(token))
    return symbols


def format_text_sequence(x: Sequence[int], per_line: int = 32) -> str:
    """Render symbols as text, `per_line` tokens to a line."""
    lines = [
        " ".join(str(s) for s in x[start:start + per_line])
        for start in range(0, len(x), per_line)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def encode_varints(x: Sequence[int]) -> bytes:
    """Unsigned LEB128 encoding, one varint per symbol."""
    out = bytearray()
    for value in x:
        if value < 0:
            raise InvalidInputError(f"Varints hold non-negative integers, got {value}")
        while True:
            byte = value & 0x7F
            value >>= 7
            if value:
                out.append(byte | 0x80)
            else:
                out.append(byte)
                break
    return bytes(out)


def decode_varints(data: bytes) -> List[int]:
    """Inverse of encode_varints.

    Raises:
        InvalidInputError: If the data ends inside a varint
    """
    symbols = []
    value = shift = 0
    pending = False
    for byte in data:
        value |= (byte & 0x7F) << shift
        if byte & 0x80:
            shift += 7
            pending = True
        else:
            symbols.append(value)
            value = shift = 0
            pending = False
    if pending:
        raise InvalidInputError(f"Varint data ends inside symbol {len(symbols) + 1}")
    return symbols


def read_sequence(path: Path, fmt: str = 'text') -> List[int]:
    """Read a symbol sequence from disk.

    Raises:
        ValidationError: If the format is unknown
        InvalidInputError: If the contents cannot be parsed
        OSError: If the file cannot be read
    """
    if fmt not in FORMATS:
        raise ValidationError(f"Unknown format '{fmt}'. Choose from: {', '.join(FORMATS)}")
    path = Path(path)
    if fmt == 'varint':
        return decode_varints(path.read_bytes())
    return parse_text_sequence(path.read_text(encoding='utf-8'))


def write_sequence(path: Path, x: Sequence[int], fmt: str = 'text') -> None:
    """Write a symbol sequence to disk.

    Raises:
        ValidationError: If the format is unknown
        OSError: If the file cannot be written
    """
    if fmt not in FORMATS:
        raise ValidationError(f"Unknown format '{fmt}'. Choose from: {', '.join(FORMATS)}")
    path = Path(path)
    if fmt == 'varint':
        path.write_bytes(encode_varints(x))
    else:
        path.write_text(format_text_sequence(x), encoding='utf-8')
