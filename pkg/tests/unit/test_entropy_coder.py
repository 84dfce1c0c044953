"""Tests for entropy_coder module."""
import math

import pytest

from src.bitio import BitReader, BitWriter
from src.entropy_coder import (
    MAX_TOTAL,
    ArithmeticDecoder,
    ArithmeticEncoder,
    FrequencyTable,
    ac_decode,
    ac_encode,
    ideal_code_length,
)
from src.utils.exceptions import InvalidInputError, ModelMismatchError

TOLERANCE = 1e-4


def _assert_within_contract(symbols, table):
    bits = ac_encode(symbols, table)
    ideal = ideal_code_length(symbols, table)
    assert -TOLERANCE <= bits.bit_length - ideal <= 2 + TOLERANCE
    assert ac_decode(bits, table, len(symbols)) == list(symbols)


def test_table_from_runs_merges_equal_frequencies():
    """Test adjacent runs with equal frequencies are merged."""
    table = FrequencyTable.from_runs([(2, 5), (3, 5), (1, 2)])
    assert table.run_lengths == (5, 1)
    assert table.symbol_count == 6
    assert table.total == 27


def test_table_bounds_and_locate():
    """Test cumulative intervals and their inverse."""
    table = FrequencyTable.from_frequencies([4, 0, 2, 2])
    assert table.cumulative_frequencies == [0, 4, 4, 6, 8]
    assert table.bounds(2) == (4, 6)
    assert table.locate(5) == (2, 4, 6)
    assert table.locate(0) == (0, 0, 4)
    assert table.frequency(1) == 0


def test_table_rejects_oversized_total():
    """Test totals above the coder limit are rejected."""
    with pytest.raises(InvalidInputError):
        FrequencyTable.from_frequencies([MAX_TOTAL, 1])


def test_table_rejects_zero_total():
    """Test an all-zero table is rejected."""
    with pytest.raises(InvalidInputError):
        FrequencyTable.from_frequencies([0, 0])


def test_encode_zero_frequency_symbol():
    """Test coding a zero-frequency symbol raises ModelMismatchError."""
    table = FrequencyTable.from_frequencies([3, 0, 1])
    with pytest.raises(ModelMismatchError):
        ac_encode([0, 1], table)
    with pytest.raises(ModelMismatchError):
        ideal_code_length([1], table)


def test_single_symbol_alphabet_costs_nothing():
    """Test a certain symbol produces an empty stream."""
    table = FrequencyTable.from_frequencies([7])
    bits = ac_encode([0] * 100, table)
    assert bits.bit_length == 0
    assert ac_decode(bits, table, 100) == [0] * 100


def test_uniform_binary_length():
    """Test fair bits cost about one bit each."""
    table = FrequencyTable.from_frequencies([1, 1])
    _assert_within_contract([0, 1, 1, 0, 1, 0, 0, 0, 1, 1] * 20, table)


def test_skewed_table_contract(rng):
    """Test the length contract on a heavily skewed table."""
    table = FrequencyTable.from_frequencies([MAX_TOTAL - 3, 1, 1, 1])
    symbols = [0] * 5000 + [3, 1, 2]
    _assert_within_contract(symbols, table)


def test_fuzzed_tables_contract(rng):
    """Test the length contract on random tables and sequences."""
    for _ in range(200):
        size = int(rng.integers(1, 40))
        freqs = [int(f) for f in rng.integers(1, 1 << int(rng.integers(1, 20)), size=size)]
        table = FrequencyTable.from_frequencies(freqs)
        probs = [f / table.total for f in freqs]
        length = int(rng.integers(1, 300))
        symbols = [int(s) for s in rng.choice(size, size=length, p=probs)]
        _assert_within_contract(symbols, table)


def test_run_length_table_large_alphabet():
    """Test a table of 2^40 symbols stored as three runs."""
    table = FrequencyTable.from_runs([(1, 1 << 20), (2 ** 40 - 2, 0), (1, 1 << 10)])
    symbols = [0, 2 ** 40 - 1, 0, 0]
    _assert_within_contract(symbols, table)


def test_streaming_with_two_tables():
    """Test consecutive symbols coded under different tables share one stream."""
    first = FrequencyTable.from_frequencies([3, 1])
    second = FrequencyTable.from_frequencies([1, 1, 1, 5])
    plan = [(0, first), (3, second), (1, first), (2, second), (3, second), (0, first)]
    writer = BitWriter()
    encoder = ArithmeticEncoder(writer)
    for symbol, table in plan:
        encoder.encode(symbol, table)
    encoder.finish()
    ideal = sum(math.log2(t.total / t.frequency(s)) for s, t in plan)
    assert writer.bit_length - ideal <= 2 + TOLERANCE

    reader = BitReader(writer.getvalue(), limit=writer.bit_length, zero_fill=True)
    decoder = ArithmeticDecoder(reader)
    assert [decoder.decode(t) for _, t in plan] == [s for s, _ in plan]
