"""Configuration search and the top-level compress/decompress entry points."""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from ..estimators import EmpiricalCounts, empirical_counts, ml_description_length
from ..utils.config_loader import get_config
from ..utils.exceptions import ValidationError
from ..utils.logger import get_logger
from ..utils.validation import validate_positive_int, validate_sequence
from .base import (
    MAX_ALPHABET,
    Candidate,
    CodecConfig,
    CodecMode,
    CostBreakdown,
    select_best,
)
from .container import decode, write_container
from .fast import clustered_lower_bound, effective_alphabet_candidates, encode_fast
from .individual import individual_candidates
from .large import encode_large, large_lower_bound
from .small import encode_small, small_lower_bound

logger = get_logger(__name__)

SEARCH_MODES = ('auto', 'small', 'large', 'fast', 'individual')


@dataclass
class CompressionResult:
    """Container bytes with the chosen configuration and its bit accounting.

    Attributes:
        data: Container bytes
        config: Chosen configuration
        breakdown: Bits per container component
        evaluated: (label, lower bound, exact section bits or None) per candidate
    """
    data: bytes
    config: CodecConfig
    breakdown: CostBreakdown
    evaluated: List[Tuple[str, float, Optional[int]]] = field(default_factory=list)

    @property
    def total_bits(self) -> int:
        return self.breakdown.total


def small_alphabet_candidates(counts: EmpiricalCounts) -> List[int]:
    """k_max and every larger power of two whose cube is at most n."""
    values = [counts.k_max]
    j = counts.k_max.bit_length()
    while (1 << (3 * j)) <= counts.n:
        values.append(1 << j)
        j += 1
    return values


def _small(x, counts, k_hat, ideal) -> Candidate:
    return Candidate(
        config=CodecConfig(CodecMode.SMALL_K, counts.n, k_hat=k_hat),
        lower_bound=small_lower_bound(counts, k_hat, ideal),
        encoder=lambda w: encode_small(x, k_hat, w, counts),
    )


def _large(x, counts, ideal) -> Candidate:
    return Candidate(
        config=CodecConfig(CodecMode.LARGE, counts.n),
        lower_bound=large_lower_bound(counts, ideal),
        encoder=lambda w: encode_large(x, w, counts),
    )


def _fast(x, counts, m, ideal) -> Candidate:
    return Candidate(
        config=CodecConfig(CodecMode.FAST, counts.n, m=m, sigma_index=counts.tail_count(m)),
        lower_bound=clustered_lower_bound(counts, m, ideal=ideal),
        encoder=lambda w: encode_fast(x, m, w, counts),
    )


def build_candidates(x: Sequence[int], counts: EmpiricalCounts, mode: str = 'auto',
                     k: Optional[int] = None, m: Optional[int] = None,
                     exhaustive_limit: int = 64) -> List[Candidate]:
    """Candidate configurations for a search mode.

    Args:
        x: Sequence to code
        counts: Its counts
        mode: One of auto, small, large, fast, individual
        k: Fix the SMALL_K alphabet size
        m: Fix the effective alphabet of FAST / INDIVIDUAL
        exhaustive_limit: Try every m up to k_max when k_max is at most this

    Raises:
        ValidationError: If the mode is unknown or the fixed values cannot code x
    """
    if mode not in SEARCH_MODES:
        raise ValidationError(f"Unknown mode '{mode}'. Choose from: {', '.join(SEARCH_MODES)}")
    if k is not None:
        validate_positive_int('k', k)
        if k < counts.k_max:
            raise ValidationError(f"k={k} is smaller than the largest symbol {counts.k_max}")
    if m is not None:
        validate_positive_int('m', m)
        if m < 2 or counts.head_count(m) == 0:
            raise ValidationError(f"m={m} must be >= 2 and cover at least one symbol")

    ideal = ml_description_length(counts)
    direct_ok = counts.k_max <= MAX_ALPHABET
    candidates: List[Candidate] = []

    if mode in ('auto', 'small') and (direct_ok or mode == 'small'):
        for k_hat in ([k] if k is not None else small_alphabet_candidates(counts)):
            candidates.append(_small(x, counts, k_hat, ideal))
    if mode in ('auto', 'large') and (direct_ok or mode == 'large'):
        candidates.append(_large(x, counts, ideal))
    if mode in ('auto', 'fast'):
        values = [m] if m is not None else effective_alphabet_candidates(counts, exhaustive_limit)
        candidates.extend(_fast(x, counts, value, ideal) for value in values)
    if mode == 'individual':
        candidates.extend(individual_candidates(x, counts, m, exhaustive_limit))

    if not candidates:
        raise ValidationError(f"Mode '{mode}' has no configuration able to code this sequence")
    return candidates


def _search(x: Sequence[int], mode: str, k: Optional[int], m: Optional[int],
            exhaustive_limit: Optional[int]) -> Tuple[EmpiricalCounts, Candidate, List[Candidate]]:
    validate_sequence(x)
    if exhaustive_limit is None:
        exhaustive_limit = get_config().codec.exhaustive_m_limit
    counts = empirical_counts(x)
    candidates = build_candidates(x, counts, mode, k, m, exhaustive_limit)
    best = select_best(candidates)
    return counts, best, candidates


def choose_config(x: Sequence[int], mode: str = 'auto', k: Optional[int] = None,
                  m: Optional[int] = None, exhaustive_limit: Optional[int] = None) -> CodecConfig:
    """Configuration with the shortest exact encoding of x among the candidates.

    Raises:
        ValidationError: If x is empty or invalid, or the options cannot code x
    """
    return _search(x, mode, k, m, exhaustive_limit)[1].config


def compress(x: Sequence[int], mode: str = 'auto', k: Optional[int] = None,
             m: Optional[int] = None, exhaustive_limit: Optional[int] = None) -> CompressionResult:
    """Compress a sequence of positive integers into a container.

    Args:
        x: Non-empty sequence of positive integers
        mode: auto, small, large, fast or individual
        k: Fix the SMALL_K alphabet size
        m: Fix the effective alphabet of FAST / INDIVIDUAL
        exhaustive_limit: Override the configured exhaustive m search limit

    Returns:
        CompressionResult with the container and its bit accounting

    Raises:
        ValidationError: If x is empty or invalid, or the options cannot code x
    """
    counts, best, candidates = _search(x, mode, k, m, exhaustive_limit)
    data, breakdown = write_container(counts.n, best.config.mode, best.section, best.cost)
    logger.debug(f"Chose {best.config.label}: {breakdown.total} bits for n={counts.n} "
                 f"(ideal payload {breakdown.ideal_payload:.1f})")
    evaluated = [(c.config.label, c.lower_bound, c.cost.total if c.cost else None)
                 for c in candidates]
    return CompressionResult(data=data, config=best.config, breakdown=breakdown, evaluated=evaluated)


def decompress(data: bytes) -> List[int]:
    """Inverse of compress; needs nothing but the container."""
    return decode(data)
