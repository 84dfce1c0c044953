"""Sample data for testing."""
from fractions import Fraction
from typing import Any, Dict


SAMPLE_CONFIG_DATA: Dict[str, Any] = {
    'codec': {
        'exhaustive_m_limit': 16
    },
    'lab': {
        'trials': 3,
        'seed': 7,
        'table_cap': 4096,
        'max_symbol_bits': 64,
        'series_head': 1024
    },
    'bounds': {
        'eps': 0.1,
        'grid_step': 0.01,
        'nml_budget': 100000
    },
    'logging': {
        'level': 'DEBUG'
    }
}

# Hand-checked Elias codewords.
GAMMA_CODEWORDS = {
    1: '1',
    2: '010',
    3: '011',
    4: '00100',
    5: '00101',
    9: '0001001',
}

DELTA_CODEWORDS = {
    1: '1',
    2: '0100',
    3: '0101',
    4: '01100',
    5: '01101',
    8: '00100000',
    9: '00100001',
    17: '001010001',
}

# Sequences with their monotone ML as (first symbol, length, pooled probability) blocks.
PAVA_CASES = [
    ([1, 1, 1, 2, 3, 3], [(1, 1, Fraction(1, 2)), (2, 2, Fraction(1, 4))]),
    ([1, 2, 2, 3, 3, 3], [(1, 3, Fraction(1, 3))]),
    ([2, 2], [(1, 2, Fraction(1, 2))]),
    ([1, 1, 2, 1], [(1, 1, Fraction(3, 4)), (2, 1, Fraction(1, 4))]),
    ([1, 4], [(1, 1, Fraction(1, 2)), (2, 3, Fraction(1, 6))]),
]

# Sequences that every codec mode must reproduce exactly.
ROUND_TRIP_SEQUENCES = [
    [1],
    [7],
    [1, 1, 2, 1],
    [3, 3, 3],
    [1, 2, 3, 4, 5, 6, 7, 8],
    [8, 7, 6, 5, 4, 3, 2, 1],
    [1] * 50 + [2] * 20 + [3] * 5 + [9],
    [5, 1, 1, 1, 1000000],
    [2 ** 40, 1, 1, 2],
    [1, 2] * 40 + [300, 301, 300],
]

SAMPLE_TEXT_INPUT = "1 1 2\n1\n"
