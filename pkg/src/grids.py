"""Quantization grids and monotone quantization of parameter vectors.

Every grid partitions (0, 1) into dyadic intervals [2^(j-1-E), 2^(j-E)),
j = 1..E, and places left-aligned points with a per-interval spacing inside
each. Points are integers over 2^F so that an encoder and a decoder rebuild
bit-identical grids from (mode, n, k or m, alpha) alone.
"""
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .bitio import ceil_log2
from .estimators import MonotoneParamVector, Number, log2_exact
from .utils.exceptions import InvalidInputError, QuantizationError
from .utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_ALPHA = Fraction(1, 3)
MIN_PRECISION = 62
PRECISION_MARGIN = 40
MAX_REPAIR_STEPS = 1_000_000


class GridMode(str, Enum):
    """Grid families."""
    SMALL_K = "SMALL_K"
    LARGE = "LARGE"
    FAST = "FAST"
    IND_SMALL = "IND_SMALL"
    IND_LARGE = "IND_LARGE"


@dataclass(frozen=True)
class GridSpec:
    """Header-reconstructible description of a grid."""
    mode: GridMode
    n: int
    k_or_m: int
    alpha: Fraction = DEFAULT_ALPHA

    def __post_init__(self):
        if self.n < 2:
            raise InvalidInputError(f"Grids need n >= 2, got {self.n}")
        if self.k_or_m < 1:
            raise InvalidInputError(f"Grids need k or m >= 1, got {self.k_or_m}")
        if not 0 < self.alpha < 1:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def beta(self) -> float:
        return 1.0 / math.log2(self.n)

    @property
    def rho(self) -> float:
        return math.log2(self.k_or_m) / math.log2(self.n)


def iroot(value: int, q: int) -> int:
    """floor(value ** (1/q)) for non-negative integers."""
    if value < 0:
        raise InvalidInputError("iroot of a negative number")
    if value < 2 or q == 1:
        return value
    root = 1 << -(-value.bit_length() // q)
    while True:
        nxt = ((q - 1) * root + value // root ** (q - 1)) // q
        if nxt >= root:
            return root
        root = nxt


def lower_edge_exponent(spec: GridSpec) -> int:
    """Smallest E with 2^E at least the denominator of the grid's lower edge."""
    n, k = spec.n, spec.k_or_m
    p, q = spec.alpha.numerator, spec.alpha.denominator
    if spec.mode is GridMode.SMALL_K:
        return ceil_log2(n)
    if spec.mode in (GridMode.LARGE, GridMode.IND_SMALL):
        return ceil_log2(n * n)
    if spec.mode is GridMode.FAST:
        target = k ** q * n ** (2 * p)
    else:
        target = k ** q * n ** (q + p)
    return -(-ceil_log2(target) // q)


def _spacing_numerator(spec: GridSpec, top: int) -> int:
    """Spacing of an interval whose upper edge is 2^top / 2^F, as a numerator over 2^F."""
    n, k = spec.n, spec.k_or_m
    if spec.mode is GridMode.SMALL_K:
        # upper edge * sqrt(k/n)
        step = math.isqrt(((1 << (2 * top)) * k) // n)
    elif spec.mode is GridMode.IND_SMALL:
        step = ((1 << top) * k) // n
    else:
        # upper edge * n^(-alpha)
        p, q = spec.alpha.numerator, spec.alpha.denominator
        step = iroot((1 << (top * q)) // n ** p, q)
    return max(step, 1)


@dataclass(frozen=True)
class Grid:
    """Sorted grid points (numerators over 2^precision) grouped into intervals."""
    spec: GridSpec
    precision: int
    exponent: int
    points: Tuple[int, ...]
    interval_starts: Tuple[int, ...]
    spacings: Tuple[int, ...]
    _scale: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, '_scale', 1 << self.precision)

    @property
    def J(self) -> int:
        """Number of intervals."""
        return len(self.spacings)

    @property
    def B(self) -> int:
        """Number of grid points."""
        return len(self.points)

    def point(self, index: int) -> Fraction:
        return Fraction(self.points[index], self._scale)

    def interval_of(self, index: int) -> int:
        """1-based interval number of a point index."""
        return bisect_right(self.interval_starts, index)

    def interval_edges(self, j: int) -> Tuple[Fraction, Fraction]:
        shift = self.exponent - j
        return Fraction(1, 1 << (shift + 1)), Fraction(1, 1 << shift)

    def spacing(self, j: int) -> Fraction:
        return Fraction(self.spacings[j - 1], self._scale)

    def interval_count(self, j: int) -> int:
        """Number of points in interval j."""
        end = self.interval_starts[j] if j < self.J else self.B
        return end - self.interval_starts[j - 1]

    def key(self, value: Fraction) -> int:
        """floor(value * 2^F); a point p satisfies p <= value iff p <= key(value)."""
        return (value.numerator << self.precision) // value.denominator

    def floor_index(self, value: Fraction) -> int:
        """Index of the largest point <= value, or -1 below the first point."""
        return bisect_right(self.points, self.key(value)) - 1


def build_grid(spec: GridSpec) -> Grid:
    """Build the grid described by spec.

    Raises:
        InvalidInputError: If the spec yields no intervals
    """
    return _build_grid_cached(spec)


@lru_cache(maxsize=128)
def _build_grid_cached(spec: GridSpec) -> Grid:
    exponent = lower_edge_exponent(spec)
    if exponent < 1:
        raise InvalidInputError(f"Grid spec {spec} produces no intervals")
    precision = max(MIN_PRECISION, exponent + PRECISION_MARGIN)

    points: List[int] = []
    starts: List[int] = []
    spacings: List[int] = []
    for j in range(1, exponent + 1):
        top = j - exponent + precision
        lower, upper = 1 << (top - 1), 1 << top
        step = _spacing_numerator(spec, top)
        starts.append(len(points))
        spacings.append(step)
        points.extend(range(lower, upper, step))

    grid = Grid(spec=spec, precision=precision, exponent=exponent, points=tuple(points),
                interval_starts=tuple(starts), spacings=tuple(spacings))
    logger.debug(f"Built {spec.mode.value} grid n={spec.n} k/m={spec.k_or_m}: "
                 f"J={grid.J} B={grid.B} F={precision}")
    return grid


Run = Tuple[Number, int]


@dataclass(frozen=True)
class QuantizedParams:
    """Monotone quantized vector theta'.

    theta'_1 is `leading`; theta'_2..theta'_k sit on the grid and are stored as
    runs (grid index, count) in index order with non-increasing grid indices.
    `reserved` is the tail mass sigma' set aside outside the vector.
    """
    grid: Grid
    leading: Fraction
    runs: Tuple[Tuple[int, int], ...]
    reserved: Fraction = Fraction(0)
    source: Optional[Tuple[Run, ...]] = field(default=None, compare=False, repr=False)

    @property
    def support(self) -> int:
        """Number of nonzero components k-hat."""
        return 1 + sum(count for _, count in self.runs)

    @property
    def grid_indices(self) -> List[int]:
        """Dense b_2..b_k (use only for small supports)."""
        out: List[int] = []
        for index, count in self.runs:
            out.extend([index] * count)
        return out

    def value_runs(self) -> Iterator[Tuple[Fraction, int]]:
        """(value, count) runs in index order, theta'_1 first."""
        yield self.leading, 1
        for index, count in self.runs:
            yield self.grid.point(index), count

    @property
    def values(self) -> Tuple[Fraction, ...]:
        """Dense theta' (use only for small supports)."""
        return tuple(_expand(self.value_runs()))

    @property
    def errors(self) -> Tuple[Fraction, ...]:
        """Quantization errors delta_i = theta_i - theta'_i (dense)."""
        if self.source is None:
            raise QuantizationError("Quantization errors need the source vector")
        return tuple(Fraction(a) - b for a, b, count in _zip_runs(self.source, self.value_runs())
                     for _ in range(count))


def _expand(runs: Iterable[Tuple[Number, int]]) -> Iterator[Number]:
    for value, count in runs:
        for _ in range(count):
            yield value


def _zip_runs(first: Iterable[Tuple[Number, int]], second: Iterable[Tuple[Number, int]]
              ) -> Iterator[Tuple[Number, Number, int]]:
    """Walk two run-length vectors position by position, yielding overlaps."""
    it_a, it_b = iter(first), iter(second)
    va, ca = next(it_a, (None, 0))
    vb, cb = next(it_b, (None, 0))
    while ca and cb:
        step = min(ca, cb)
        yield va, vb, step
        ca -= step
        cb -= step
        if not ca:
            va, ca = next(it_a, (None, 0))
        if not cb:
            vb, cb = next(it_b, (None, 0))


def to_runs(values: Sequence[Number]) -> List[Run]:
    """Group a dense vector into (value, count) runs of equal values."""
    runs: List[List] = []
    for value in values:
        if runs and runs[-1][0] == value:
            runs[-1][1] += 1
        else:
            runs.append([value, 1])
    return [(value, count) for value, count in runs]


def quantize_runs(runs: Sequence[Run], grid: Grid, reserved: Fraction = Fraction(0)
                  ) -> QuantizedParams:
    """Quantize a non-increasing run-length vector onto grid.

    Components are processed from the smallest upward. Each takes one of its
    two neighbouring grid points (or the first point when it lies below the
    grid), choosing whichever keeps the running sum of displacements closest
    to zero while never dropping below the point chosen for the component
    after it. theta'_1 absorbs the remaining mass 1 - reserved - sum.

    Raises:
        QuantizationError: If monotonicity cannot be restored
    """
    runs = [(Fraction(value), count) for value, count in runs if count > 0]
    if not runs or runs[0][0] <= 0:
        raise QuantizationError("The largest component must be positive")
    for (prev, _), (value, _) in zip(runs, runs[1:]):
        if value > prev:
            raise QuantizationError("Parameter vector must be non-increasing")

    # Components 2..k; zero components carry no grid index.
    rest: List[Tuple[Fraction, int]] = []
    if runs[0][1] > 1:
        rest.append((runs[0][0], runs[0][1] - 1))
    rest.extend(runs[1:])
    rest = [(value, count) for value, count in rest if value > 0]

    points = grid.points
    scale = 1 << grid.precision
    carry = Fraction(0)
    floor_index = -1
    chosen: List[Tuple[int, int]] = []  # smallest first
    for value, count in reversed(rest):
        lo = grid.floor_index(value)
        if lo < 0:
            index = 0
            chosen.append((index, count))
            carry += count * (value - Fraction(points[0], scale))
            floor_index = max(floor_index, index)
            continue
        hi = lo + 1 if lo + 1 < len(points) else lo
        if hi == lo or lo < floor_index:
            index = max(hi, floor_index)
            chosen.append((index, count))
            carry += count * (value - Fraction(points[index], scale))
            floor_index = index
            continue
        p_lo = Fraction(points[lo], scale)
        p_hi = Fraction(points[hi], scale)
        gap = p_hi - p_lo
        # Number of components rounded down that leaves the smallest carry.
        lows = math.floor((count * (p_hi - value) - carry) / gap + Fraction(1, 2))
        lows = min(max(lows, 0), count)
        if lows:
            chosen.append((lo, lows))
            floor_index = max(floor_index, lo)
        if count - lows:
            chosen.append((hi, count - lows))
            floor_index = hi
        carry += count * value - lows * p_lo - (count - lows) * p_hi

    ordered: List[List[int]] = []
    for index, count in reversed(chosen):
        if ordered and ordered[-1][0] == index:
            ordered[-1][1] += count
        else:
            ordered.append([index, count])

    total = sum(count * points[index] for index, count in ordered)
    leading = 1 - reserved - Fraction(total, scale)

    steps = 0
    while ordered and leading < Fraction(points[ordered[0][0]], scale):
        steps += 1
        if steps > MAX_REPAIR_STEPS:
            raise QuantizationError("Monotonicity repair did not converge")
        index, count = ordered[0]
        if index == 0:
            raise QuantizationError(
                "Cannot restore monotonicity: the largest component is already at the first grid point"
            )
        leading += Fraction(points[index] - points[index - 1], scale)
        # Lower the last component of the top run by one grid step.
        if count == 1:
            ordered.pop(0)
            pos = 0
        else:
            ordered[0][1] -= 1
            pos = 1
        if pos < len(ordered) and ordered[pos][0] == index - 1:
            ordered[pos][1] += 1
        else:
            ordered.insert(pos, [index - 1, 1])
    if steps:
        logger.debug(f"Monotonicity repair took {steps} grid steps")

    if leading <= 0:
        raise QuantizationError("Quantized leading component is not positive")

    return QuantizedParams(grid=grid, leading=leading,
                           runs=tuple((index, count) for index, count in ordered),
                           reserved=Fraction(reserved), source=tuple(runs))


def quantize_monotone(theta: Union[MonotoneParamVector, Sequence[Number]], grid: Grid,
                      reserved: Fraction = Fraction(0)) -> QuantizedParams:
    """Quantize a dense monotone vector onto grid (see quantize_runs)."""
    values = theta.probs if isinstance(theta, MonotoneParamVector) else tuple(theta)
    return quantize_runs(to_runs(values), grid, reserved)


def kl_quantization_cost(theta: Union[MonotoneParamVector, Sequence[Number]],
                         qp: QuantizedParams, n: Optional[int] = None) -> float:
    """n * sum theta_i log2(theta_i / theta'_i), the expected cost of coding with theta'.

    Args:
        theta: Source vector that was quantized
        qp: Its quantized version
        n: Sequence length (defaults to the grid's n)
    """
    n = qp.grid.spec.n if n is None else n
    values = theta.probs if isinstance(theta, MonotoneParamVector) else tuple(theta)
    terms = []
    for a, b, count in _zip_runs(to_runs(values), qp.value_runs()):
        if a > 0:
            terms.append(count * float(a) * (log2_exact(Fraction(a)) - log2_exact(b)))
    return n * math.fsum(terms)
