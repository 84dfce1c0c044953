"""Tests for bounds module."""
import math
from fractions import Fraction

import numpy as np
import pytest

from src.bounds import (
    ASYMPTOTIC_NOTE,
    LOG2E,
    _cal_r_ind_value,
    cal_R,
    cal_R_ind,
    enumerate_sequences,
    individual_tail_log_sum,
    lb_individual,
    lb_maximin,
    lb_most_sources,
    nml_bruteforce_monotone,
    shtarkov_sum_iid,
    shtarkov_sum_monotone,
    ub_fast_effective,
    ub_fast_min,
    ub_geometric,
    ub_individual,
    ub_individual2,
    ub_powerlaw,
    ub_slow_decay,
    ub_small_large,
)
from src.estimators import empirical_counts, ml_estimate, monotone_ml
from src.utils.exceptions import BudgetExceededError, ValidationError


def _geometric_tail(m: float) -> float:
    """sum over i > m of 2^-i log2 i for p = 1/2, summed directly."""
    start = math.floor(m) + 1
    return math.fsum(2.0 ** -i * math.log2(i) for i in range(start, start + 200))


def test_nml_two_symbols_two_letters():
    """Test the monotone Shtarkov sum 1 + 1/4 + 1/4 + 1/4 for n=2, k=2."""
    assert shtarkov_sum_monotone(2, 2) == Fraction(7, 4)
    assert nml_bruteforce_monotone(2, 2) == pytest.approx(0.8074, abs=1e-4)


def test_iid_shtarkov_two_symbols():
    """Test the unrestricted i.i.d. sum for n=2, k=2."""
    assert shtarkov_sum_iid(2, 2) == Fraction(5, 2)


def test_nml_single_symbol_is_harmonic():
    """Test n=1 gives the harmonic number H_k."""
    assert shtarkov_sum_monotone(1, 4) == sum(Fraction(1, i) for i in range(1, 5))


def test_monotone_sum_below_iid_sum():
    """Test the monotone class never costs more than the i.i.d. class."""
    for n, k in [(3, 2), (4, 3), (5, 2)]:
        monotone = shtarkov_sum_monotone(n, k)
        assert 1 <= monotone <= shtarkov_sum_iid(n, k)


def _sequence_probability(x, theta) -> Fraction:
    probability = Fraction(1)
    for symbol in x:
        probability *= theta[symbol - 1]
    return probability


@pytest.mark.parametrize("n,k", [(1, 3), (2, 2), (3, 3), (4, 2), (3, 4)])
def test_shtarkov_sums_match_sequence_enumeration(n, k):
    """Test the composition sums equal a sum over every individual sequence."""
    monotone = Fraction(0)
    iid = Fraction(0)
    for x in enumerate_sequences(n, k):
        counts = empirical_counts(x)
        monotone += _sequence_probability(x, monotone_ml(counts))
        iid += _sequence_probability(x, ml_estimate(counts))
    assert shtarkov_sum_monotone(n, k) == monotone
    assert shtarkov_sum_iid(n, k) == iid
    assert nml_bruteforce_monotone(n, k) == pytest.approx(math.log2(monotone))


def test_nml_budget():
    """Test oversized enumerations are refused."""
    with pytest.raises(BudgetExceededError):
        shtarkov_sum_monotone(10, 10, budget=1000)


def test_geometric_half():
    """Test p=1/2 gives 0.5 (log2 n)^2 (1+eps) total bits."""
    n, eps = 2 ** 20, 0.1
    bound = ub_geometric(n, 0.5, eps)
    assert bound.total == pytest.approx(0.5 * 20 ** 2 * (1 + eps))
    assert bound.per_symbol == pytest.approx(bound.total / n)
    assert bound.extras['effective_alphabet'] == pytest.approx(20)


def test_geometric_three_quarters():
    """Test p=3/4 halves the coefficient to 0.25."""
    bound = ub_geometric(2 ** 16, 0.75, 0.05)
    assert bound.total == pytest.approx(0.25 * 16 ** 2 * 1.05)


def test_powerlaw_gamma_one_coefficient():
    """Test gamma=1 gives the 2/9 coefficient on n^(1/3) (log2 n)^2."""
    n, eps = 2 ** 30, 0.01
    bound = ub_powerlaw(n, 1.0, eps)
    assert bound.region == 'gamma_at_most_2'
    coefficient = bound.total / (n ** (1 / 3) * 30 ** 2)
    assert coefficient == pytest.approx((1 + eps) * (2 / 9) * (1 + eps))


def test_powerlaw_fast_decay_region():
    """Test gamma above 2 uses the n^(1/(1+gamma)) branch with a = 1/zeta(1+gamma)."""
    bound = ub_powerlaw(2 ** 20, 3.0, 0.1)
    assert bound.region == 'gamma_above_2'
    assert bound.params['a'] == pytest.approx(90 / math.pi ** 4)
    with pytest.raises(ValidationError):
        ub_powerlaw(2 ** 20, 0.0, 0.1)


def test_slow_decay_exponent():
    """Test gamma=1 gives exponent 5/7 and alpha 1/7."""
    bound = ub_slow_decay(2 ** 20, 1.0, 0.1)
    assert bound.extras['exponent'] == pytest.approx(5 / 7)
    assert bound.extras['alpha'] == pytest.approx(1 / 7)
    assert bound.total == pytest.approx(1.1 * (2 ** 20) ** (5 / 7) * 400 / 2)
    with pytest.raises(ValidationError):
        ub_slow_decay(2 ** 20, -1.0, 0.1)


def test_lower_bound_regions():
    """Test the region switch at the n^(1/3) thresholds."""
    n = 10 ** 9
    assert lb_maximin(n, 10, 0.1).region == 'small_k'
    assert lb_maximin(n, 10 ** 5, 0.1).region == 'large_k'
    assert lb_most_sources(n, 10, 0.1).region == 'small_k'
    assert lb_individual(n, 10).region == 'small_k'
    assert lb_individual(n, 10 ** 6).region == 'large_k'
    assert lb_individual(n, n).region == 'k_at_least_n'


def test_lower_bounds_report_continuity_gap():
    """Test both branches are reported with their gap."""
    bound = lb_maximin(10 ** 6, 20, 0.1)
    assert set(bound.alternatives) == {'small_k', 'large_k'}
    gap = abs(bound.alternatives['small_k'] - bound.alternatives['large_k'])
    assert bound.extras['continuity_gap'] == pytest.approx(gap)
    assert bound.slack == ASYMPTOTIC_NOTE


def test_lower_bounds_need_two_letters():
    """Test k=1 and n=1 are rejected."""
    with pytest.raises(ValidationError):
        lb_maximin(100, 1, 0.1)
    with pytest.raises(ValidationError):
        lb_most_sources(1, 4, 0.1)
    with pytest.raises(ValidationError):
        lb_maximin(100, 4, 1.0)


def test_two_part_upper_regions():
    """Test the small, sublinear and linear branches."""
    n = 10 ** 9
    assert ub_small_large(n, 100, 0.1).region == 'small_k'
    bound = ub_small_large(n, 10 ** 5, 0.1)
    assert bound.region in ('sublinear_k', 'linear_k')
    assert bound.per_symbol == pytest.approx(
        min(bound.alternatives['sublinear_k'], bound.alternatives['linear_k']))
    assert ub_small_large(n, 10 ** 12, 0.1).extras['beyond_linear'] == 1.0


def test_individual_linear_branch_is_half():
    """Test the individual bound's linear branch is half the average-case one."""
    n, k = 10 ** 9, 10 ** 9
    average = ub_small_large(n, k, 0.1).alternatives['linear_k']
    individual = ub_individual(n, k, 0.1).alternatives['linear_k']
    assert individual == pytest.approx(average / 2)


def test_cal_r_small_m():
    """Test (m-1)/2 (log2 n - 3 log2 m) for m^3 <= n."""
    bound = cal_R(4096, 8, 0.1)
    assert bound.region == 'small_m'
    assert bound.total == pytest.approx(10.5)
    assert ub_fast_effective(4096, 8, 0.1).total == pytest.approx(1.1 * 10.5)


def test_cal_r_large_m():
    """Test the n^(1/3) (log2 n)^2 branch above n^(1/3)."""
    n, eps = 2 ** 30, 0.1
    bound = cal_R(n, 2 ** 15, eps)
    rho = 0.5
    expected = 0.5 * (rho + 2 / 3) * (rho + eps - 1 / 3) * 900 * 2 ** 10
    assert bound.region == 'large_m'
    assert bound.total == pytest.approx(expected)


def test_cal_r_ind_regions():
    """Test the three individual description-cost regions."""
    assert cal_R_ind(4096, 8).total == pytest.approx(31.5)
    medium = cal_R_ind(4096, 32)
    assert medium.region == 'medium_m'
    assert medium.total == pytest.approx(64.0)
    large = cal_R_ind(4096, 64)
    assert large.region == 'large_m'
    assert 0 < large.extras['alpha'] < large.extras['rho']


def test_fast_min_is_grid_minimum():
    """Test the numeric minimum is no worse than any admissible grid point."""
    n, eps = 2 ** 16, 0.1
    bound = ub_fast_min(n, _geometric_tail, eps, grid_step=0.05)
    log_n = math.log2(n)

    def objective(alpha, rho):
        return (0.5 * (rho + 2 * alpha) * (rho - alpha) * log_n ** 2 * n ** alpha
                + 5 * LOG2E * n ** (1 - 2 * alpha)
                + (1 + 1 / rho) * n * _geometric_tail(n ** rho))

    values = np.arange(1, 61) * 0.05
    admissible = [objective(a, r) for a in values for r in values if r >= a + eps - 1e-12]
    assert bound.total <= (1 + eps) * min(admissible) * (1 + 1e-9)
    assert bound.extras['rho'] >= bound.extras['alpha'] + eps - 1e-9


def test_individual2_zero_tail():
    """Test a sequence without tail symbols picks a grid rho."""
    bound = ub_individual2(4096, lambda m: 0.0, 0.1)
    assert 0 < bound.extras['rho'] <= 3
    assert bound.extras['m'] == pytest.approx(4096 ** bound.extras['rho'])
    assert bound.total > 0


def test_individual2_refines_rho_off_grid():
    """Test the refined minimum is no worse than any point of a coarse rho grid."""
    n, eps, step = 4096, 0.1, 0.1
    bound = ub_individual2(n, _geometric_tail, eps, grid_step=step)
    grid = [
        _cal_r_ind_value(n, rho)[0] + (1 + 1 / rho) * _geometric_tail(n ** rho)
        for rho in (step * i for i in range(1, 31))
    ]
    assert bound.total <= (1 + eps) * min(grid) * (1 + 1e-12)
    assert step <= bound.extras['rho'] <= 3.0


def test_individual_tail_log_sum():
    """Test the tail callback sums log2 of distinct symbols above m."""
    tail = individual_tail_log_sum(empirical_counts([1, 4, 4, 8]))
    assert tail(2) == pytest.approx(2 + 3)
    assert tail(8) == 0
