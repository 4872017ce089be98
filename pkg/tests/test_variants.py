import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from couponfriends.rng import RngStream
from couponfriends.sim import DomainError
from couponfriends.variants import (
    UntilCompleteResult,
    empirical_cdf,
    limit_law_check,
    resolve_m_rule,
    samples_until_complete,
    samples_until_m_sets,
    until_complete_batch,
    upper_tail,
)


def test_single_type():
    assert samples_until_complete(1, RngStream(0)).samples_used == 1
    assert samples_until_m_sets(1, 5, RngStream(0)).samples_used == 5


def test_two_types_mean_is_three():
    xs = until_complete_batch(2, 1, 10**5, seed=3)
    assert abs(xs.mean() - 3) < 0.05
    ys = until_complete_batch(2, 1, 10**5, seed=4)
    assert abs(ys.mean() - 3) < 0.05


def test_rejects_bad_sizes():
    with pytest.raises(DomainError):
        samples_until_m_sets(0, 1, RngStream(0))
    with pytest.raises(DomainError):
        samples_until_m_sets(3, 0, RngStream(0))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(1, 4), st.integers(0, 2**63))
def test_coupling_domination_lower_bound(n, m, seed):
    one = samples_until_complete(n, RngStream(seed)).samples_used
    assert samples_until_m_sets(n, 1, RngStream(seed)).samples_used == one
    prev = 0
    for k in range(1, m + 1):
        v = samples_until_m_sets(n, k, RngStream(seed)).samples_used
        assert v >= n * k and v >= prev
        prev = v


def test_batch_matches_streams():
    xs = until_complete_batch(20, 2, 10, seed=9)
    assert xs.tolist() == [samples_until_m_sets(20, 2, RngStream(9, i)).samples_used for i in range(10)]


def test_empirical_cdf_examples():
    rs = [UntilCompleteResult(3), UntilCompleteResult(5), UntilCompleteResult(5)]
    assert empirical_cdf(rs, [4]) == [pytest.approx(1 / 3)]
    assert empirical_cdf(rs, [0]) == [0]
    assert empirical_cdf(rs, [5]) == [1]
    assert upper_tail(rs, [5]) == [pytest.approx(2 / 3)]
    with pytest.raises(DomainError):
        empirical_cdf([], [1])


@given(st.lists(st.integers(1, 100), min_size=1), st.lists(st.integers(0, 120), min_size=1))
def test_cdf_non_decreasing(xs, ts):
    ts = sorted(ts)
    cdf = empirical_cdf(xs, ts)
    assert cdf == sorted(cdf)


def test_limit_law_rows():
    rows = limit_law_check(until_complete_batch(50, 1, 200, seed=1), 50)
    assert [r["c"] for r in rows] == [-1.0, 0.0, 1.0]
    assert rows[1]["lower_threshold"] == math.floor(50 * math.log(50))


def test_m_rules():
    assert [resolve_m_rule("log_n", n) for n in (100, 1000)] == [5, 7]
    assert resolve_m_rule("sqrt_n", 100) == 10
    assert resolve_m_rule("linear_n", 12) == 12
    assert resolve_m_rule("const", 12, 3) == 3
    with pytest.raises(ValueError):
        resolve_m_rule("cubic", 10)


@pytest.mark.parametrize("n,m", [(30, 2), (200, 3), (1000, 2)])
def test_mean_matches_quadrature(n, m):
    # Poissonized exact expectation: E = n * int_0^inf 1 - (1 - P(Poisson(t) < m))^n dt
    from scipy.integrate import quad
    from scipy.stats import poisson

    exact = n * quad(lambda t: 1 - (1 - poisson.cdf(m - 1, t)) ** n, 0, 200,
                     limit=500, points=[math.log(n)])[0]
    xs = until_complete_batch(n, m, 4000, seed=n + m)
    se = xs.std() / math.sqrt(xs.size)
    assert abs(xs.mean() - exact) < 4 * se
