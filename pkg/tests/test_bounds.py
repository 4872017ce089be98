import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from couponfriends import bounds
from couponfriends.sim import DomainError


def test_no_exchange_values():
    assert bounds.rc_no_exchange_ub(10, 10) == 93
    assert bounds.rc_no_exchange_ub(1, 1) == 1
    assert bounds.rc_no_exchange_ub(50, 20) == 691


def test_unlimited_values():
    assert bounds.rc_unlimited_ub(50, 20) == 957
    assert bounds.rc_unlimited_ub(1, 5) == 16
    assert bounds.rc_unlimited_ub(100, 1) == 8969


def test_main_values():
    assert bounds.rc_main_ub(50, 20) == 2153
    assert bounds.re_main_ub(50, 20) == 829
    assert bounds.rc_main_ub(1, 1) == 36


def test_quarter_presets():
    assert bounds.quarter_nlog2m(50, 50) == 70
    assert bounds.quarter_nlogn(1000) == math.floor(1000 * math.log(1000) / 4)


@pytest.mark.parametrize("f", [bounds.rc_no_exchange_ub, bounds.rc_unlimited_ub,
                               bounds.rc_main_ub, bounds.re_main_ub])
def test_zero_inputs_rejected(f):
    with pytest.raises(DomainError):
        f(0, 3)
    with pytest.raises(DomainError):
        f(3, 0)


def test_er_limits():
    assert bounds.er_limit_lower(0) == pytest.approx(math.exp(-1), abs=1e-12)
    assert bounds.er_limit_lower(0) == pytest.approx(0.367879, abs=1e-6)
    assert bounds.er_limit_upper(0) == pytest.approx(0.632121, abs=1e-6)
    assert bounds.er_limit_lower(50) == 0.0
    assert bounds.er_limit_upper(-50) == 1.0


def test_newman_shepp():
    assert bounds.newman_shepp_expectation(1000, 1) == pytest.approx(6907.76, abs=0.01)
    assert bounds.newman_shepp_expectation(1000, 2) == pytest.approx(8840.40, abs=0.01)
    with pytest.raises(DomainError):
        bounds.newman_shepp_expectation(2, 2)


def test_report():
    r = bounds.bound_report(50, 20)
    assert (r.rc_no_exchange_ub, r.rc_unlimited_ub, r.rc_main_ub, r.re_main_ub) == (691, 957, 2153, 829)
    assert "2153" in r.to_text()
    assert set(r.as_dict()["formulas"]) == {"rc_no_exchange_ub", "rc_unlimited_ub", "rc_main_ub", "re_main_ub"}


sizes = st.integers(1, 5000)


@given(sizes, sizes)
def test_monotone_in_n(n, m):
    for f in (bounds.rc_no_exchange_ub, bounds.rc_unlimited_ub, bounds.rc_main_ub):
        assert f(n + 1, m) >= f(n, m) >= 1
    assert bounds.re_main_ub(n + 1, m) >= bounds.re_main_ub(n, m) >= 0


@given(sizes, sizes)
def test_monotone_in_m(n, m):
    assert bounds.rc_unlimited_ub(n, m + 1) <= bounds.rc_unlimited_ub(n, m)
    assert bounds.rc_main_ub(n, m + 1) <= bounds.rc_main_ub(n, m)
    assert bounds.re_main_ub(n, m + 1) >= bounds.re_main_ub(n, m)
    assert bounds.rc_no_exchange_ub(n, m + 1) >= bounds.rc_no_exchange_ub(n, m)


@given(sizes, sizes)
def test_main_to_unlimited_ratio(n, m):
    x = 16 * (n + n * math.log(n) / m)
    # both are ceilings of 36/16 * x and x, so the ratio is pinned up to one unit each
    ratio = bounds.rc_main_ub(n, m) / bounds.rc_unlimited_ub(n, m)
    delta = (36 / 16 + 1) / x
    assert 36 / 16 - delta <= ratio <= 36 / 16 + delta


@given(st.floats(-3, 3), st.floats(0.01, 1))
def test_limits_strictly_decreasing(c, d):
    assert bounds.er_limit_lower(c + d) < bounds.er_limit_lower(c)
    assert bounds.er_limit_upper(c + d) < bounds.er_limit_upper(c)
    for f in (bounds.er_limit_lower, bounds.er_limit_upper):
        assert 0 < f(c) < 1
