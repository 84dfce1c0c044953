"""Two-part codes for sequences from monotone distributions."""
from .base import CodecConfig, CodecMode, CostBreakdown, SectionCost
from .container import decode
from .fast import decode_fast, encode_fast
from .individual import decode_individual, encode_individual
from .large import decode_large, encode_large
from .search import CompressionResult, choose_config, compress, decompress
from .small import decode_small, encode_small

__all__ = [
    'CodecConfig',
    'CodecMode',
    'CompressionResult',
    'CostBreakdown',
    'SectionCost',
    'choose_config',
    'compress',
    'decode',
    'decode_fast',
    'decode_individual',
    'decode_large',
    'decode_small',
    'decompress',
    'encode_fast',
    'encode_individual',
    'encode_large',
    'encode_small',
]
