"""Redundancy laboratory: example monotone sources, sampling and measurement."""
import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np
from numpy.random import SeedSequence, default_rng

from .bounds import (
    BoundValue,
    ub_fast_min,
    ub_geometric,
    ub_individual,
    ub_powerlaw,
    ub_slow_decay,
    ub_small_large,
)
from .codecs import compress
from .estimators import (
    empirical_counts,
    entropy,
    ml_description_length,
    monotone_ml_description_length,
)
from .utils.config_loader import get_config
from .utils.exceptions import ValidationError
from .utils.logger import get_logger
from .utils.validation import validate_positive_int, validate_probability, validate_theta

logger = get_logger(__name__)

WORKING_DPS = 30
CSV_COLUMNS = [
    'family', 'params', 'seed', 'n', 'trials', 'mean_bits', 'entropy_bits', 'total_red',
    'per_symbol_red', 'bound', 'bound_ratio', 'mode_histogram',
]


class Family(str, Enum):
    """Source families of the laboratory."""
    POWERLAW = "powerlaw"      # theta_i = a / i^(1+gamma), i >= 1
    GEOMETRIC = "geometric"    # theta_i = p (1-p)^(i-1), i >= 1
    SLOWLOG = "slowlog"        # theta_i = a / (i (log2 i)^(2+gamma)), i >= 2
    EXPLICIT = "explicit"      # finite theta vector


@dataclass(frozen=True)
class SourceSpec:
    """An i.i.d. monotone source and the seed its samples derive from.

    Attributes:
        family: Distribution family
        gamma: Decay parameter of POWERLAW (> 0) and SLOWLOG (> -1)
        p: Success probability of GEOMETRIC
        theta: Probabilities of symbols 1..k for EXPLICIT
        seed: 64-bit base seed
    """
    family: Family
    gamma: Optional[float] = None
    p: Optional[float] = None
    theta: Optional[Tuple[float, ...]] = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'family', Family(self.family))
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed must be a 64-bit non-negative integer, got {self.seed}")

        if self.family is Family.POWERLAW:
            if self.gamma is None or self.gamma <= 0:
                raise ValidationError(f"POWERLAW needs gamma > 0, got {self.gamma}")
        elif self.family is Family.SLOWLOG:
            if self.gamma is None or self.gamma <= -1:
                raise ValidationError(f"SLOWLOG needs gamma > -1, got {self.gamma}")
            if self.gamma <= 0:
                logger.warning(f"SLOWLOG gamma={self.gamma} <= 0 has infinite entropy")
        elif self.family is Family.GEOMETRIC:
            if self.p is None:
                raise ValidationError("GEOMETRIC needs p")
            validate_probability(self.p)
        else:
            if self.theta is None:
                raise ValidationError("EXPLICIT needs a theta vector")
            theta = tuple(float(t) for t in self.theta)
            validate_theta(theta)
            object.__setattr__(self, 'theta', theta)

    @property
    def first_symbol(self) -> int:
        return 2 if self.family is Family.SLOWLOG else 1

    @property
    def exponent(self) -> float:
        """Exponent s of the polynomial or logarithmic decay."""
        if self.family is Family.POWERLAW:
            return 1 + self.gamma
        return 2 + self.gamma

    @property
    def params_label(self) -> str:
        if self.family is Family.GEOMETRIC:
            return f"p={self.p:g}"
        if self.family is Family.EXPLICIT:
            return "theta=" + ";".join(f"{t:g}" for t in self.theta)
        return f"gamma={self.gamma:g}"

    @property
    def label(self) -> str:
        return f"{self.family.value}({self.params_label})"

    def with_seed(self, seed: int) -> 'SourceSpec':
        return SourceSpec(self.family, self.gamma, self.p, self.theta, seed)


@dataclass
class WynerCheck:
    """E[log2 X] against the entropy of the same source."""
    expected_log: float
    entropy: float
    passed: bool


@dataclass
class RedundancyReport:
    """Measured average redundancy of the codec on one (source, n) cell."""
    family: str
    params: str
    seed: int
    n: int
    trials: int
    mean_total_bits: float
    std_error: float
    entropy_total: float
    total_redundancy: float
    per_symbol_redundancy: float
    bound_value: float
    bound_region: str
    bound_ratio: float
    mode_histogram: Dict[str, int] = field(default_factory=dict)
    numeric_bound: Optional[float] = None
    against_ml: bool = False

    @property
    def histogram_label(self) -> str:
        """Configurations chosen, most frequent first: "FAST/m=16:28|SMALL_K/k=3:2"."""
        ordered = sorted(self.mode_histogram.items(), key=lambda item: (-item[1], item[0]))
        return "|".join(f"{label}:{count}" for label, count in ordered)

    def to_row(self) -> Dict[str, str]:
        def fmt(value: float) -> str:
            return '%.10g' % value
        return {
            'family': self.family,
            'params': self.params,
            'seed': str(self.seed),
            'n': str(self.n),
            'trials': str(self.trials),
            'mean_bits': fmt(self.mean_total_bits),
            'entropy_bits': fmt(self.entropy_total),
            'total_red': fmt(self.total_redundancy),
            'per_symbol_red': fmt(self.per_symbol_redundancy),
            'bound': fmt(self.bound_value),
            'bound_ratio': fmt(self.bound_ratio),
            'mode_histogram': self.histogram_label,
        }


@dataclass
class IndividualReport:
    """Pointwise redundancy of one sequence against its ML description lengths."""
    n: int
    k_max: int
    total_bits: int
    monotone_ml_bits: float
    iid_ml_bits: float
    config: str
    bound: BoundValue

    @property
    def redundancy_monotone(self) -> float:
        return self.total_bits - self.monotone_ml_bits

    @property
    def redundancy_iid(self) -> float:
        return self.total_bits - self.iid_ml_bits


# Series helpers. Terms beyond the configured head use the Euler-Maclaurin
# formula with closed-form tail integrals.

def _slowlog_term(s) -> Callable:
    return lambda i: 1 / (i * mp.log(i, 2) ** s)


def _slowlog_log_term(s) -> Callable:
    return lambda i: 1 / (i * mp.log(i, 2) ** (s - 1))


def _slowlog_loglog_term(s) -> Callable:
    return lambda i: mp.log(mp.log(i, 2), 2) / (i * mp.log(i, 2) ** s)


def _slowlog_integrals(s) -> Dict[str, Callable]:
    def mass(x):
        return mp.log(2) * mp.log(x, 2) ** (1 - s) / (s - 1)

    def log_mass(x):
        return mp.log(2) * mp.log(x, 2) ** (2 - s) / (s - 2)

    def loglog_mass(x):
        lead = mp.log(x, 2)
        return lead ** (1 - s) * (mp.log(lead) / (s - 1) + 1 / (s - 1) ** 2)

    return {'mass': mass, 'log': log_mass, 'loglog': loglog_mass}


@lru_cache(maxsize=64)
def _head_prefix(s: float, kind: str, head: int) -> Tuple:
    """Prefix sums of a SLOWLOG series over i = 2..head-1."""
    term = {'mass': _slowlog_term, 'log': _slowlog_log_term, 'loglog': _slowlog_loglog_term}[kind](s)
    with mp.workdps(WORKING_DPS):
        prefix = [mp.mpf(0)]
        for i in range(2, head):
            prefix.append(prefix[-1] + term(mp.mpf(i)))
    return tuple(prefix)


def _slowlog_series(s: float, kind: str, start: int) -> mp.mpf:
    """Sum over i >= start (start >= 2) of a SLOWLOG series."""
    head = get_config().lab.series_head
    term = {'mass': _slowlog_term, 'log': _slowlog_log_term, 'loglog': _slowlog_loglog_term}[kind](s)
    integral = _slowlog_integrals(s)[kind]
    with mp.workdps(WORKING_DPS):
        cut = max(start, head)
        direct = mp.mpf(0)
        if start < head:
            prefix = _head_prefix(s, kind, head)
            direct = prefix[-1] - prefix[start - 2]
        edge = mp.mpf(cut)
        return direct + integral(edge) + term(edge) / 2 - mp.diff(term, edge) / 12


@lru_cache(maxsize=128)
def normalizer(spec: SourceSpec) -> float:
    """Normalization constant a of POWERLAW and SLOWLOG (1 otherwise)."""
    with mp.workdps(WORKING_DPS):
        if spec.family is Family.POWERLAW:
            return float(1 / mp.zeta(spec.exponent))
        if spec.family is Family.SLOWLOG:
            return float(1 / _slowlog_series(spec.exponent, 'mass', 2))
    return 1.0


def probability(spec: SourceSpec, i: int) -> float:
    """theta_i of the source."""
    if i < spec.first_symbol:
        return 0.0
    if spec.family is Family.POWERLAW:
        return normalizer(spec) * i ** -spec.exponent
    if spec.family is Family.GEOMETRIC:
        return spec.p * (1 - spec.p) ** (i - 1)
    if spec.family is Family.SLOWLOG:
        return normalizer(spec) / (i * math.log2(i) ** spec.exponent)
    return spec.theta[i - 1] if i <= len(spec.theta) else 0.0


def tail_mass(spec: SourceSpec, m: float) -> float:
    """P(X > m)."""
    start = max(math.floor(m) + 1, spec.first_symbol)
    with mp.workdps(WORKING_DPS):
        if spec.family is Family.POWERLAW:
            return float(normalizer(spec) * mp.zeta(spec.exponent, start))
        if spec.family is Family.GEOMETRIC:
            return float(mp.power(1 - mp.mpf(spec.p), start - 1))
        if spec.family is Family.SLOWLOG:
            return float(normalizer(spec) * _slowlog_series(spec.exponent, 'mass', start))
    return math.fsum(spec.theta[start - 1:])


def tail_log_sum(spec: SourceSpec, m: float) -> float:
    """Sum over i > m of theta_i log2 i; tail_log_sum(spec, 0) is E[log2 X]."""
    start = max(math.floor(m) + 1, spec.first_symbol)
    with mp.workdps(WORKING_DPS):
        if spec.family is Family.POWERLAW:
            return float(-normalizer(spec) * mp.zeta(spec.exponent, start, 1) / mp.log(2))
        if spec.family is Family.GEOMETRIC:
            p = mp.mpf(spec.p)
            return float(mp.nsum(lambda i: p * (1 - p) ** (i - 1) * mp.log(i, 2), [start, mp.inf]))
        if spec.family is Family.SLOWLOG:
            if spec.gamma <= 0:
                return math.inf
            return float(normalizer(spec) * _slowlog_series(spec.exponent, 'log', start))
    return math.fsum(t * math.log2(i) for i, t in enumerate(spec.theta[start - 1:], start=start))


def true_entropy(spec: SourceSpec) -> float:
    """Entropy in bits per symbol; math.inf flags a divergent series (SLOWLOG, gamma <= 0)."""
    if spec.family is Family.EXPLICIT:
        return entropy(spec.theta)
    if spec.family is Family.GEOMETRIC:
        p = spec.p
        return (-p * math.log2(p) - (1 - p) * math.log2(1 - p)) / p
    if spec.family is Family.SLOWLOG and spec.gamma <= 0:
        return math.inf

    a = normalizer(spec)
    expected_log = tail_log_sum(spec, 0)
    if spec.family is Family.POWERLAW:
        return -math.log2(a) + spec.exponent * expected_log
    with mp.workdps(WORKING_DPS):
        loglog = float(a * _slowlog_series(spec.exponent, 'loglog', 2))
    return -math.log2(a) + expected_log + spec.exponent * loglog


def wyner_check(spec: SourceSpec, tolerance: float = 1e-10) -> WynerCheck:
    """Check E[log2 X] <= H(X) for a finite-entropy monotone source.

    Raises:
        ValidationError: If the source has infinite entropy
    """
    h = true_entropy(spec)
    if math.isinf(h):
        raise ValidationError(f"{spec.label} has infinite entropy")
    expected_log = tail_log_sum(spec, 0)
    return WynerCheck(expected_log=expected_log, entropy=h, passed=expected_log <= h + tolerance)


@lru_cache(maxsize=32)
def _survival_table(spec: SourceSpec, cap: int) -> np.ndarray:
    """P(X > i) for i = first_symbol..last tabulated symbol."""
    if spec.family is Family.EXPLICIT:
        theta = np.array(spec.theta, dtype=np.float64)
        survival = np.concatenate([np.cumsum(theta[::-1])[::-1][1:], [0.0]])
        return survival
    symbols = np.arange(spec.first_symbol, cap + 1, dtype=np.float64)
    a = normalizer(spec)
    if spec.family is Family.POWERLAW:
        pmf = a * symbols ** -spec.exponent
    else:
        pmf = a / (symbols * np.log2(symbols) ** spec.exponent)
    beyond = tail_mass(spec, cap)
    survival = np.concatenate([np.cumsum(pmf[::-1])[::-1][1:], [0.0]]) + beyond
    logger.debug(f"Survival table for {spec.label}: {len(survival)} entries, tail mass {beyond:.3e}")
    return survival


FIXED_ONE = 2 ** 64


@lru_cache(maxsize=32)
def _fixed_survival(spec: SourceSpec, cap: int) -> np.ndarray:
    """Survival table as 64-bit fixed point, reversed into ascending order."""
    scaled = (int(value * FIXED_ONE) for value in _survival_table(spec, cap).tolist())
    return np.array([min(value, FIXED_ONE - 1) for value in scaled][::-1], dtype=np.uint64)


def _tail_symbol(spec: SourceSpec, v: float, cap: int, max_bits: int) -> int:
    """Continuous inverse of the survival function beyond the table."""
    a = normalizer(spec)
    s = spec.exponent
    if spec.family is Family.POWERLAW:
        gamma = spec.gamma
        log2_x = (math.log2(a / gamma) - math.log2(v)) / gamma
    else:
        log2_x = (v * (s - 1) / (a * math.log(2))) ** (1 / (1 - s))
    if log2_x >= max_bits:
        logger.warning(f"Clamped a {spec.label} draw of about 2^{log2_x:.1f} below 2^{max_bits}")
        return 2 ** max_bits - 1
    with mp.workdps(WORKING_DPS):
        return max(cap + 1, int(mp.ceil(mp.power(2, log2_x))))


def sample(spec: SourceSpec, n: int, trial: int = 0) -> List[int]:
    """Draw n i.i.d. symbols by inverse-CDF sampling.

    Uniform 64-bit integers u select the smallest symbol whose survival
    probability, in 64-bit fixed point, is at most u. Only the geometric
    closed form and the continuous tail inverse use the float fraction
    (u + 1/2) / 2^64. The stream is derived from (seed, trial).

    Args:
        spec: Source to sample
        n: Number of draws
        trial: Trial index; each index gets an independent stream

    Returns:
        List of positive integers
    """
    validate_positive_int('n', n)
    lab = get_config().lab
    rng = default_rng(SeedSequence([spec.seed, trial]))
    draws = rng.integers(0, 2 ** 64 - 1, size=n, dtype=np.uint64, endpoint=True)
    v = (draws.astype(np.float64) + 0.5) * 2.0 ** -64
    limit = 2 ** lab.max_symbol_bits - 1

    if spec.family is Family.GEOMETRIC:
        x = np.floor(np.log(v) / np.log1p(-spec.p)) + 1
        symbols = [int(s) for s in x.tolist()]
        if any(s > limit for s in symbols):
            logger.warning(f"Clamped {spec.label} draws below 2^{lab.max_symbol_bits}")
            symbols = [min(s, limit) for s in symbols]
        return symbols

    ascending = _fixed_survival(spec, lab.table_cap)
    # Entries above u precede the drawn symbol
    index = len(ascending) - np.searchsorted(ascending, draws, side='right')
    symbols = (index + spec.first_symbol).tolist()
    last = spec.first_symbol + len(ascending) - 1
    for position in np.flatnonzero(index == len(ascending)).tolist():
        symbols[position] = _tail_symbol(spec, float(v[position]), last, lab.max_symbol_bits)
    return symbols


def family_bound(spec: SourceSpec, n: int, eps: float) -> BoundValue:
    """Redundancy upper bound matching the source family."""
    if spec.family is Family.GEOMETRIC:
        return ub_geometric(n, spec.p, eps)
    if spec.family is Family.POWERLAW:
        return ub_powerlaw(n, spec.gamma, eps, a=normalizer(spec))
    if spec.family is Family.SLOWLOG:
        return ub_slow_decay(n, spec.gamma, eps)
    return ub_small_large(n, len(spec.theta), eps)


def measure_redundancy(spec: SourceSpec, n: int, trials: Optional[int] = None,
                       mode: str = 'auto', eps: Optional[float] = None) -> RedundancyReport:
    """Average code length of `trials` samples minus n times the entropy.

    Sources with infinite entropy are measured against the ML description
    length of each sample instead, and the report is flagged.

    Args:
        spec: Source to sample
        n: Sequence length (>= 2)
        trials: Number of independent samples (defaults to the configured value)
        mode: Codec search mode
        eps: Slack of the attached bound (defaults to the configured value)

    Returns:
        RedundancyReport for the cell
    """
    config = get_config()
    trials = config.lab.trials if trials is None else trials
    eps = config.bounds.eps if eps is None else eps
    validate_positive_int('trials', trials)
    validate_positive_int('n', n)
    if n < 2:
        raise ValidationError("Redundancy measurements need n >= 2")

    h = true_entropy(spec)
    against_ml = math.isinf(h)
    bits, references = [], []
    histogram: Counter = Counter()
    for trial in range(trials):
        x = sample(spec, n, trial)
        result = compress(x, mode=mode)
        bits.append(result.total_bits)
        histogram[result.config.label] += 1
        if against_ml:
            references.append(ml_description_length(empirical_counts(x)))

    mean_bits = float(np.mean(bits))
    std_error = float(np.std(bits, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    entropy_total = float(np.mean(references)) if against_ml else n * h
    total_red = mean_bits - entropy_total

    bound = family_bound(spec, n, eps)
    numeric = None
    if not against_ml:
        numeric = ub_fast_min(n, lambda m: tail_log_sum(spec, m), eps).total
    ratio = total_red / bound.total if bound.total > 0 else math.nan

    logger.info(f"{spec.label} n={n}: redundancy {total_red:.1f} bits "
                f"({total_red / n:.5f}/symbol), bound {bound.total:.1f}")
    return RedundancyReport(
        family=spec.family.value,
        params=spec.params_label,
        seed=spec.seed,
        n=n,
        trials=trials,
        mean_total_bits=mean_bits,
        std_error=std_error,
        entropy_total=entropy_total,
        total_redundancy=total_red,
        per_symbol_redundancy=total_red / n,
        bound_value=bound.total,
        bound_region=bound.region,
        bound_ratio=ratio,
        mode_histogram=dict(histogram),
        numeric_bound=numeric,
        against_ml=against_ml,
    )


def measure_individual_redundancy(x: Sequence[int], eps: Optional[float] = None) -> IndividualReport:
    """Code x with the individual-sequence codec and compare with its ML description lengths."""
    eps = get_config().bounds.eps if eps is None else eps
    counts = empirical_counts(x)
    result = compress(x, mode='individual')
    return IndividualReport(
        n=counts.n,
        k_max=counts.k_max,
        total_bits=result.total_bits,
        monotone_ml_bits=monotone_ml_description_length(counts),
        iid_ml_bits=ml_description_length(counts),
        config=result.config.label,
        bound=ub_individual(max(counts.n, 2), counts.k_max, eps),
    )


def run_experiment(cells: Iterable[Tuple[SourceSpec, int]], output_path: Optional[Path] = None,
                   trials: Optional[int] = None, mode: str = 'auto',
                   eps: Optional[float] = None) -> List[RedundancyReport]:
    """Measure every (source, n) cell and optionally write one CSV row per cell.

    Raises:
        OSError: If the CSV file cannot be written
    """
    reports = [measure_redundancy(spec, n, trials, mode, eps) for spec, n in cells]
    if output_path is not None:
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for report in reports:
                writer.writerow(report.to_row())
        logger.info(f"Wrote {len(reports)} rows to {output_path}")
    return reports
