"""Empirical statistics, ML and monotone ML estimators, description lengths."""
import math
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .utils.exceptions import InvalidInputError, ValidationError

Number = Union[Fraction, float, int]


def log2_exact(value: Number) -> float:
    """log2 of a positive Fraction or integer without float underflow."""
    if isinstance(value, Fraction):
        return math.log2(value.numerator) - math.log2(value.denominator)
    return math.log2(value)


@dataclass(frozen=True)
class EmpiricalCounts:
    """Occurrence counts n_x(i) of a sequence over the positive integers."""
    counts: Dict[int, int]
    n: int
    k_max: int
    symbols: Tuple[int, ...] = field(init=False, repr=False, compare=False)
    _prefix: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        symbols = tuple(sorted(s for s, c in self.counts.items() if c > 0))
        prefix = [0]
        for s in symbols:
            prefix.append(prefix[-1] + self.counts[s])
        if prefix[-1] != self.n:
            raise ValidationError(f"Counts sum to {prefix[-1]}, expected n={self.n}")
        object.__setattr__(self, 'symbols', symbols)
        object.__setattr__(self, '_prefix', tuple(prefix))

    def count(self, i: int) -> int:
        return self.counts.get(i, 0)

    def head_count(self, m: int) -> int:
        """Number of occurrences of symbols <= m."""
        return self._prefix[bisect_right(self.symbols, m)]

    def tail_count(self, m: int) -> int:
        """n_x(x > m)."""
        return self.n - self.head_count(m)

    def distinct_tail(self, m: int) -> int:
        """c_x(x > m), the number of distinct symbols above m."""
        return len(self.symbols) - bisect_right(self.symbols, m)

    def tail_symbols(self, m: int) -> List[Tuple[int, int]]:
        """(symbol, count) pairs for symbols above m in increasing order."""
        return [(s, self.counts[s]) for s in self.symbols[bisect_right(self.symbols, m):]]

    def largest_at_most(self, m: int) -> int:
        """Largest occurring symbol <= m, or 0 when none occurs."""
        pos = bisect_right(self.symbols, m)
        return self.symbols[pos - 1] if pos else 0

    def tail_log_sum(self, m: float) -> float:
        """Sum of log2 i over distinct occurring symbols i > m."""
        start = bisect_right(self.symbols, math.floor(m)) if m >= 1 else 0
        return math.fsum(math.log2(s) for s in self.symbols[start:])

    def dense(self, upto: Optional[int] = None) -> List[int]:
        """Counts for symbols 1..upto as a list (upto defaults to k_max)."""
        upto = self.k_max if upto is None else upto
        return [self.counts.get(i, 0) for i in range(1, upto + 1)]


@dataclass(frozen=True)
class MonotoneParamVector:
    """Non-increasing probability vector theta_1 >= ... >= theta_k."""
    probs: Tuple[Number, ...]

    def __post_init__(self):
        probs = tuple(self.probs)
        object.__setattr__(self, 'probs', probs)
        if not probs:
            raise ValidationError("A parameter vector needs at least one component")
        for i in range(1, len(probs)):
            if probs[i] > probs[i - 1]:
                raise ValidationError(
                    f"Parameter vector is not monotone at index {i + 1}: {probs[i]} > {probs[i - 1]}"
                )
        if probs[-1] < 0:
            raise ValidationError("Probabilities must be non-negative")
        if all(isinstance(p, (Fraction, int)) for p in probs):
            if sum(probs) != 1:
                raise ValidationError(f"Probabilities sum to {sum(probs)}, expected exactly 1")
        elif abs(math.fsum(float(p) for p in probs) - 1.0) > 1e-12:
            raise ValidationError("Probabilities do not sum to 1")

    @property
    def support_size(self) -> int:
        return len(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, index):
        return self.probs[index]


@dataclass(frozen=True)
class PoolBlock:
    """Consecutive symbols start..start+length-1 sharing `total` pooled occurrences."""
    start: int
    length: int
    total: int

    @property
    def end(self) -> int:
        return self.start + self.length - 1

    def value(self, n: int) -> Fraction:
        """Pooled per-symbol probability total/(length*n)."""
        return Fraction(self.total, self.length * n)


def empirical_counts(x: Iterable[int]) -> EmpiricalCounts:
    """Count symbol occurrences.

    Raises:
        InvalidInputError: If a symbol is not a positive integer
    """
    counts = Counter()
    n = 0
    for symbol in x:
        if isinstance(symbol, bool) or not isinstance(symbol, int) or symbol < 1:
            raise InvalidInputError(f"Symbols must be positive integers, got {symbol!r}")
        counts[symbol] += 1
        n += 1
    return EmpiricalCounts(counts=dict(counts), n=n, k_max=max(counts) if counts else 0)


def ml_estimate(c: EmpiricalCounts) -> List[Fraction]:
    """Standard ML estimate n_x(i)/n for i = 1..k_max."""
    if c.n == 0:
        raise ValidationError("ML estimate of an empty sequence is undefined")
    return [Fraction(c.count(i), c.n) for i in range(1, c.k_max + 1)]


def pava_blocks(c: EmpiricalCounts, upto: Optional[int] = None) -> List[PoolBlock]:
    """Pool-adjacent-violators over symbols 1..k, k = largest occurring symbol <= upto.

    Symbols that never occur take part as zero-count blocks, so they can be
    pooled upward with a later occurring symbol. Runs of absent symbols enter
    as a single block, keeping the work proportional to the number of distinct
    symbols rather than to k.

    Returns:
        Blocks in symbol order with non-increasing pooled values
    """
    limit = c.k_max if upto is None else upto
    stack: List[List[int]] = []  # [start, length, total]
    expected = 1
    for symbol in c.symbols:
        if symbol > limit:
            break
        if symbol > expected:
            stack.append([expected, symbol - expected, 0])
        stack.append([symbol, 1, c.counts[symbol]])
        expected = symbol + 1
        # Merge while the previous block's mean is below the last one's.
        while len(stack) > 1 and stack[-2][2] * stack[-1][1] < stack[-1][2] * stack[-2][1]:
            start, length, total = stack.pop()
            stack[-1][1] += length
            stack[-1][2] += total
    return [PoolBlock(start, length, total) for start, length, total in stack]


def monotone_ml(c: EmpiricalCounts) -> MonotoneParamVector:
    """Monotone ML estimate over symbols 1..k_max (Grenander estimator).

    Raises:
        ValidationError: If the sequence is empty
    """
    if c.n == 0:
        raise ValidationError("Monotone ML of an empty sequence is undefined")
    probs: List[Fraction] = []
    for block in pava_blocks(c):
        probs.extend([block.value(c.n)] * block.length)
    return MonotoneParamVector(tuple(probs))


def blocks_description_length(blocks: Sequence[PoolBlock], n: int) -> float:
    """-log2 of the probability the pooled estimate assigns to the counted symbols."""
    return math.fsum(
        block.total * (math.log2(block.length * n) - math.log2(block.total))
        for block in blocks if block.total
    )


def ml_description_length(c: EmpiricalCounts) -> float:
    """-log2 P_theta_hat(x) for the standard ML estimate."""
    return math.fsum(cnt * (math.log2(c.n) - math.log2(cnt)) for cnt in c.counts.values() if cnt)


def monotone_ml_description_length(c: EmpiricalCounts) -> float:
    """-log2 P_theta_hat_M(x) for the monotone ML estimate."""
    return blocks_description_length(pava_blocks(c), c.n)


def description_length(x: Iterable[int], theta: Sequence[Number]) -> float:
    """Code length -sum log2 theta_{x_t} of a sequence.

    Args:
        x: Sequence of symbols >= 1
        theta: Probabilities of symbols 1, 2, ...

    Returns:
        Length in bits; math.inf when a symbol has zero probability
    """
    terms = []
    for symbol, count in Counter(x).items():
        if symbol < 1 or symbol > len(theta) or theta[symbol - 1] <= 0:
            return math.inf
        terms.append(-count * log2_exact(theta[symbol - 1]))
    return math.fsum(terms) + 0.0


def entropy(theta: Iterable[Number]) -> float:
    """Shannon entropy in bits per symbol, with 0 log 0 = 0."""
    return math.fsum(-float(p) * log2_exact(p) for p in theta if p > 0) + 0.0
