"""Closed-form redundancy bounds and a brute-force NML oracle.

All logarithms are base 2. Unquantified O(.) and o(.) corrections in the
bound statements are evaluated as zero; every result carries a note saying so.
Piecewise bounds report the region that applied and the value of every
branch, so continuity gaps at region boundaries can be inspected.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, Iterator, Optional, Tuple

import mpmath as mp
import numpy as np
from scipy.optimize import minimize_scalar

from .estimators import EmpiricalCounts, pava_blocks
from .utils.config_loader import get_config
from .utils.exceptions import BudgetExceededError, ValidationError
from .utils.logger import get_logger
from .utils.validation import validate_epsilon, validate_positive_int, validate_probability

logger = get_logger(__name__)

LOG2E = math.log2(math.e)
ASYMPTOTIC_NOTE = "asymptotic: O(.) and o(.) terms evaluated as 0"
EXACT_NOTE = "exact"

TailCallback = Callable[[float], float]


@dataclass
class BoundValue:
    """A redundancy bound evaluated at concrete parameters.

    Attributes:
        name: Bound identifier
        per_symbol: Bits per symbol
        total: Bits for the whole sequence (n * per_symbol)
        region: Label of the branch that applied
        params: Inputs the bound was evaluated at
        alternatives: Per-symbol value of every evaluated branch
        extras: Optimizers, thresholds and other derived quantities
        slack: What was left out of the evaluation
    """
    name: str
    per_symbol: float
    total: float
    region: str
    params: Dict[str, float]
    alternatives: Dict[str, float] = field(default_factory=dict)
    extras: Dict[str, float] = field(default_factory=dict)
    slack: str = ASYMPTOTIC_NOTE


def _from_total(name: str, n: int, total: float, region: str, params: Dict[str, float],
                alternatives: Optional[Dict[str, float]] = None,
                extras: Optional[Dict[str, float]] = None,
                slack: str = ASYMPTOTIC_NOTE) -> BoundValue:
    return BoundValue(name=name, per_symbol=total / n, total=total, region=region,
                      params=params, alternatives=alternatives or {},
                      extras=extras or {}, slack=slack)


def _check_n(n: int) -> None:
    validate_positive_int('n', n)
    if n < 2:
        raise ValidationError(f"Bounds need n >= 2, got {n}")


def lb_maximin(n: int, k: int, eps: float) -> BoundValue:
    """Lower bound on the average maximin and minimax redundancy over k-letter monotone sources."""
    _check_n(n)
    validate_positive_int('k', k)
    validate_epsilon(eps)
    if k < 2:
        raise ValidationError("k >= 2 required")
    log_n = math.log2(n)
    threshold = (math.pi * n ** (1 - eps) / 2) ** (1 / 3)
    r1 = ((k - 1) / (2 * n) * ((1 - eps) * log_n - 3 * math.log2(k))
          + (k - 1) / (2 * n) * math.log2(math.pi * math.e ** 3 / 2))
    r2 = (math.pi / 2) ** (1 / 3) * 1.5 * LOG2E * n ** ((1 - eps) / 3) / n
    region, value = ('small_k', r1) if k <= threshold else ('large_k', r2)
    return _from_total('lb_maximin', n, value * n, region, {'n': n, 'k': k, 'eps': eps},
                       {'small_k': r1, 'large_k': r2},
                       {'threshold': threshold, 'continuity_gap': abs(r1 - r2)})


def lb_most_sources(n: int, k: int, eps: float) -> BoundValue:
    """Lower bound that holds for all but a vanishing volume of k-letter monotone sources."""
    _check_n(n)
    validate_positive_int('k', k)
    validate_epsilon(eps)
    if k < 2:
        raise ValidationError("k >= 2 required")
    log_n = math.log2(n)
    threshold = 0.5 * (n ** (1 - eps) / math.pi) ** (1 / 3)
    r1 = ((k - 1) / (2 * n) * ((1 - eps) * log_n - 3 * math.log2(k))
          - (k - 1) / (2 * n) * math.log2(8 * math.pi / math.e ** 3))
    r2 = 1.5 * LOG2E / (2 * math.pi ** (1 / 3)) * n ** ((1 - eps) / 3) / n
    region, value = ('small_k', r1) if k <= threshold else ('large_k', r2)
    return _from_total('lb_most_sources', n, value * n, region, {'n': n, 'k': k, 'eps': eps},
                       {'small_k': r1, 'large_k': r2},
                       {'threshold': threshold, 'continuity_gap': abs(r1 - r2)})


def lb_individual(n: int, k: int) -> BoundValue:
    """Lower bound on the individual minimax redundancy w.r.t. the monotone ML description length."""
    _check_n(n)
    validate_positive_int('k', k)
    c = math.exp(5 / 18) / (2 * math.pi) ** (1 / 3)
    threshold = c * n ** (1 / 3)
    r1 = ((k - 1) / (2 * n) * (math.log2(n) - 3 * math.log2(k))
          + (k / n) * math.log2(math.exp(23 / 12) / math.sqrt(2 * math.pi)))
    r2 = c * 1.5 * LOG2E * n ** (1 / 3) / n
    r3 = 1.5 * LOG2E * n ** (1 / 3) / n
    if k <= threshold:
        region, value = 'small_k', r1
    elif k < n:
        region, value = 'large_k', r2
    else:
        region, value = 'k_at_least_n', r3
    return _from_total('lb_individual', n, value * n, region, {'n': n, 'k': k},
                       {'small_k': r1, 'large_k': r2, 'k_at_least_n': r3},
                       {'threshold': threshold})


def _two_part_upper(name: str, n: int, k: int, eps: float, third: float,
                    params: Dict[str, float]) -> BoundValue:
    log_n = math.log2(n)
    r1 = (1 + eps) * (k - 1) / (2 * n) * (log_n + 2 * math.log2(log_n) - 3 * math.log2(k))
    r2 = (1 + eps) * log_n * (math.log2(k) - (1 / 3 - eps) * log_n) * n ** (1 / 3) / n
    r3 = (1 + eps) * third * log_n ** 2 * n ** (1 / 3) / n
    alternatives = {'small_k': r1, 'sublinear_k': r2, 'linear_k': r3}
    if k ** 3 <= n:
        region, value = 'small_k', r1
    elif r2 <= r3:
        region, value = 'sublinear_k', r2
    else:
        region, value = 'linear_k', r3
    extras = {'threshold': n ** (1 / 3)}
    if k > n:
        extras['beyond_linear'] = 1.0
    return _from_total(name, n, value * n, region, params, alternatives, extras)


def ub_small_large(n: int, k: int, eps: float) -> BoundValue:
    """Average redundancy achieved by the two-part grid codes for a k-letter alphabet.

    Above n^(1/3) the smaller of the o(n) and O(n) branches applies; they cross
    at k = n^(1-eps).
    """
    _check_n(n)
    validate_positive_int('k', k)
    validate_epsilon(eps)
    return _two_part_upper('ub_small_large', n, k, eps, 2 / 3, {'n': n, 'k': k, 'eps': eps})


def ub_individual(n: int, k: int, eps: float) -> BoundValue:
    """Individual-sequence redundancy for sequences with a monotone empirical distribution."""
    _check_n(n)
    validate_positive_int('k', k)
    validate_epsilon(eps)
    return _two_part_upper('ub_individual', n, k, eps, 1 / 3, {'n': n, 'k': k, 'eps': eps})


def _cal_r_value(n: int, m: float, eps: float) -> Tuple[float, str]:
    log_n = math.log2(n)
    if m ** 3 <= n:
        return (m - 1) / 2 * (log_n - 3 * math.log2(m)), 'small_m'
    rho = math.log2(m) / log_n
    return 0.5 * (rho + 2 / 3) * (rho + eps - 1 / 3) * log_n ** 2 * n ** (1 / 3), 'large_m'


def cal_R(n: int, m: int, eps: float) -> BoundValue:
    """Description cost of an effective alphabet m (total bits, before the 1+eps factor)."""
    _check_n(n)
    validate_positive_int('m', m)
    validate_epsilon(eps)
    value, region = _cal_r_value(n, m, eps)
    rho = math.log2(m) / math.log2(n)
    return _from_total('cal_R', n, value, region, {'n': n, 'm': m, 'eps': eps},
                       extras={'rho': rho})


def ub_fast_effective(n: int, m: int, eps: float) -> BoundValue:
    """Redundancy (1+eps) cal_R(n, m) / n for a source whose tail beyond m is negligible."""
    base = cal_R(n, m, eps)
    return _from_total('ub_fast_effective', n, (1 + eps) * base.total, base.region,
                       base.params, extras=dict(base.extras))


def _hundredths(step: float, upper: float = 3.0) -> np.ndarray:
    count = int(round(upper / step))
    return np.arange(1, count + 1) * step


def ub_fast_min(n: int, tail_sum: TailCallback, eps: float,
                grid_step: Optional[float] = None) -> BoundValue:
    """Numeric minimum over (alpha, rho) of the clustered-tail code's redundancy bound.

    Args:
        n: Sequence length
        tail_sum: m -> sum over i > m of theta_i log2 i
        eps: Slack parameter; rho >= alpha + eps
        grid_step: Search grid resolution (defaults to the configured 0.01)

    Returns:
        BoundValue with the minimizing alpha and rho in extras
    """
    _check_n(n)
    validate_epsilon(eps)
    step = grid_step or get_config().bounds.grid_step
    log_n = math.log2(n)

    @lru_cache(maxsize=None)
    def tail_term(rho: float) -> float:
        return (1 + 1 / rho) * n * tail_sum(n ** rho)

    def objective(alpha: float, rho: float) -> float:
        return (0.5 * (rho + 2 * alpha) * (rho - alpha) * log_n ** 2 * n ** alpha
                + 5 * LOG2E * n ** (1 - 2 * alpha) + tail_term(rho))

    values = _hundredths(step)
    alphas, rhos = np.meshgrid(values, values, indexing='ij')
    tails = np.array([tail_term(float(r)) for r in values])[np.newaxis, :]
    grid = (0.5 * (rhos + 2 * alphas) * (rhos - alphas) * log_n ** 2 * np.power(float(n), alphas)
            + 5 * LOG2E * np.power(float(n), 1 - 2 * alphas) + tails)
    grid = np.where(rhos >= alphas + eps - 1e-12, grid, np.inf)
    i, j = np.unravel_index(np.argmin(grid), grid.shape)
    alpha, rho = float(values[i]), float(values[j])
    best = float(grid[i, j])

    # Refine alpha, then rho, accepting only improvements over the grid point.
    lo, hi = max(1e-6, alpha - step), min(rho - eps, alpha + step)
    if hi > lo:
        res = minimize_scalar(lambda a: objective(a, rho), bounds=(lo, hi), method='bounded',
                              options={'xatol': 1e-6})
        if res.success and res.fun < best:
            alpha, best = float(res.x), float(res.fun)
    lo, hi = max(alpha + eps, rho - step), rho + step
    if hi > lo:
        res = minimize_scalar(lambda r: objective(alpha, r), bounds=(lo, hi), method='bounded',
                              options={'xatol': 1e-6})
        if res.success and res.fun < best:
            rho, best = float(res.x), float(res.fun)

    logger.debug(f"ub_fast_min n={n}: alpha={alpha:.4f} rho={rho:.4f} value={best:.3f}")
    return _from_total('ub_fast_min', n, (1 + eps) * best, 'numeric_min',
                       {'n': n, 'eps': eps}, extras={'alpha': alpha, 'rho': rho})


def ub_powerlaw(n: int, gamma: float, eps: float, a: Optional[float] = None) -> BoundValue:
    """Redundancy achievable for theta_i = a / i^(1+gamma)."""
    _check_n(n)
    validate_epsilon(eps)
    if gamma <= 0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    if a is None:
        a = float(1 / mp.zeta(1 + gamma))
    log_n = math.log2(n)
    slow = (1 + eps) * (1 / 9) * (1 + 1 / gamma) * (2 / gamma + eps - 1) * n ** (1 / 3) * log_n ** 2 / n
    fast = ((1 + eps) * (a * (3 + gamma) / (1 + gamma) / gamma + (1 - 3 / (1 + gamma)) / 2)
            * n ** (1 / (1 + gamma)) * log_n / n)
    region, value = ('gamma_at_most_2', slow) if gamma <= 2 else ('gamma_above_2', fast)
    return _from_total('ub_powerlaw', n, value * n, region,
                       {'n': n, 'gamma': gamma, 'eps': eps, 'a': a},
                       {'gamma_at_most_2': slow, 'gamma_above_2': fast})


def ub_geometric(n: int, p: float, eps: float) -> BoundValue:
    """Redundancy achievable for geometric sources theta_i = p (1-p)^(i-1)."""
    _check_n(n)
    validate_probability(p)
    validate_epsilon(eps)
    decay = -math.log2(1 - p)
    log_n = math.log2(n)
    total = (1 + eps) / (2 * decay) * log_n ** 2
    return _from_total('ub_geometric', n, total, 'geometric', {'n': n, 'p': p, 'eps': eps},
                       extras={'effective_alphabet': log_n / decay})


def ub_slow_decay(n: int, gamma: float, eps: float) -> BoundValue:
    """Redundancy achievable for theta_i = a / (i (log2 i)^(2+gamma)), i >= 2."""
    _check_n(n)
    validate_epsilon(eps)
    if gamma <= -1:
        raise ValidationError(f"gamma must exceed -1, got {gamma}")
    if gamma <= 0:
        logger.warning(f"gamma={gamma} <= 0: the per-symbol redundancy bound does not diminish")
    exponent = (gamma + 4) / (3 * gamma + 4)
    total = (1 + eps) * n ** exponent * math.log2(n) ** 2 / 2
    return _from_total('ub_slow_decay', n, total, 'slow_decay', {'n': n, 'gamma': gamma, 'eps': eps},
                       extras={'exponent': exponent, 'alpha': gamma / (4 + 3 * gamma),
                               'ell': 2 / (4 + 3 * gamma)})


def _ind_large_objective(n: int, rho: float, alpha):
    log_n = math.log2(n)
    return ((rho + 1 + alpha) / 2 * (rho - alpha) * log_n ** 2 * np.power(float(n), alpha)
            + 3 * LOG2E * np.power(float(n), 1 - alpha))


def _cal_r_ind_value(n: int, rho: float, step: float = 0.001,
                     refine: bool = False) -> Tuple[float, str, Optional[float]]:
    log_n = math.log2(n)
    m = n ** rho
    if 3 * rho <= 1:
        return (m - 1) / 2 * (log_n - math.log2(m)), 'small_m', None
    if 2 * rho < 1:
        return m * (log_n - 2 * math.log2(m)), 'medium_m', None
    alphas = np.arange(step, rho, step)
    if alphas.size == 0:
        alphas = np.array([rho / 2])
    values = _ind_large_objective(n, rho, alphas)
    best_index = int(np.argmin(values))
    alpha, best = float(alphas[best_index]), float(values[best_index])
    if refine:
        lo, hi = max(1e-9, alpha - step), min(rho - 1e-9, alpha + step)
        res = minimize_scalar(lambda a: float(_ind_large_objective(n, rho, a)), bounds=(lo, hi),
                              method='bounded', options={'xatol': 1e-7})
        if res.success and res.fun < best:
            alpha, best = float(res.x), float(res.fun)
    return best, 'large_m', alpha


def cal_R_ind(n: int, m: int) -> BoundValue:
    """Individual-sequence description cost of an effective alphabet m (total bits)."""
    _check_n(n)
    validate_positive_int('m', m)
    rho = math.log2(m) / math.log2(n)
    if m ** 3 <= n:
        value, region, alpha = (m - 1) / 2 * math.log2(n / m), 'small_m', None
    elif m * m < n:
        value, region, alpha = m * math.log2(n / (m * m)), 'medium_m', None
    else:
        value, region, alpha = _cal_r_ind_value(n, rho, refine=True)
    extras = {'rho': rho}
    if alpha is not None:
        extras['alpha'] = alpha
    return _from_total('cal_R_ind', n, value, region, {'n': n, 'm': m}, extras=extras)


def ub_individual2(n: int, tail_logsum: TailCallback, eps: float,
                   grid_step: Optional[float] = None) -> BoundValue:
    """Individual redundancy w.r.t. the monotone ML description length, minimized over rho.

    Args:
        n: Sequence length
        tail_logsum: m -> sum of log2 i over distinct symbols i > m occurring in the sequence
        eps: Slack parameter
        grid_step: Resolution of the rho grid
    """
    _check_n(n)
    validate_epsilon(eps)
    step = grid_step or get_config().bounds.grid_step

    def objective(rho: float) -> float:
        return _cal_r_ind_value(n, rho)[0] + (1 + 1 / rho) * tail_logsum(n ** rho)

    value, rho = min((objective(float(r)), float(r)) for r in _hundredths(step))

    # Refine around the grid minimum, accepting only improvements.
    lo, hi = max(step, rho - step), min(3.0, rho + step)
    if hi > lo:
        res = minimize_scalar(objective, bounds=(lo, hi), method='bounded', options={'xatol': 1e-6})
        if res.success and res.fun < value:
            value, rho = float(res.fun), float(res.x)
    region = _cal_r_ind_value(n, rho)[1]
    logger.debug(f"ub_individual2 n={n}: rho={rho:.4f} value={value:.3f}")
    return _from_total('ub_individual2', n, (1 + eps) * value, region, {'n': n, 'eps': eps},
                       extras={'rho': rho, 'm': n ** rho})


def individual_tail_log_sum(counts: EmpiricalCounts) -> TailCallback:
    """Tail callback of ub_individual2 for a concrete sequence."""
    return counts.tail_log_sum


def _compositions(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """All count vectors of length k summing to n."""
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _multinomial(counts: Tuple[int, ...]) -> int:
    result = math.factorial(sum(counts))
    for c in counts:
        result //= math.factorial(c)
    return result


def _check_budget(n: int, k: int, budget: Optional[int]) -> None:
    validate_positive_int('n', n)
    validate_positive_int('k', k)
    budget = get_config().bounds.nml_budget if budget is None else budget
    if k ** n > budget:
        raise BudgetExceededError(
            f"k^n = {k}^{n} exceeds the enumeration budget {budget}; choose a smaller (n, k)"
        )


def _monotone_ml_probability(counts: Tuple[int, ...]) -> Fraction:
    n = sum(counts)
    empirical = EmpiricalCounts(counts={i + 1: c for i, c in enumerate(counts) if c},
                                n=n, k_max=max(i + 1 for i, c in enumerate(counts) if c))
    probability = Fraction(1)
    for block in pava_blocks(empirical):
        if block.total:
            probability *= block.value(n) ** block.total
    return probability


def shtarkov_sum_monotone(n: int, k: int, budget: Optional[int] = None) -> Fraction:
    """Exact sum over all k^n sequences of their monotone ML probability.

    Raises:
        BudgetExceededError: If k^n exceeds the enumeration budget
    """
    _check_budget(n, k, budget)
    return sum((_multinomial(c) * _monotone_ml_probability(c) for c in _compositions(n, k)),
               Fraction(0))


def shtarkov_sum_iid(n: int, k: int, budget: Optional[int] = None) -> Fraction:
    """Exact unrestricted i.i.d. Shtarkov sum over all k^n sequences."""
    _check_budget(n, k, budget)
    total = Fraction(0)
    for c in _compositions(n, k):
        probability = Fraction(1)
        for count in c:
            if count:
                probability *= Fraction(count, n) ** count
        total += _multinomial(c) * probability
    return total


def nml_bruteforce_monotone(n: int, k: int, budget: Optional[int] = None) -> float:
    """log2 of the monotone Shtarkov sum, the individual minimax redundancy of M_k.

    Raises:
        BudgetExceededError: If k^n exceeds the enumeration budget
    """
    total = shtarkov_sum_monotone(n, k, budget)
    return math.log2(total.numerator) - math.log2(total.denominator)


def enumerate_sequences(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """Every sequence over 1..k of length n (small instances only)."""
    return product(range(1, k + 1), repeat=n)
