"""Run-until-complete variants: the classic collector and m full sets ("siblings")."""
import math
from dataclasses import dataclass

import numpy as np

from . import bounds, kernels
from .rng import RngStream, check_seed
from .sim import DomainError

M_RULES = ("const", "log_n", "sqrt_n", "linear_n")


@dataclass(frozen=True)
class UntilCompleteResult:
    samples_used: int


def samples_until_m_sets(n, m, rng: RngStream):
    """Draws until every one of ``n`` types has been seen ``m`` times."""
    if n < 1 or m < 1:
        raise DomainError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    return UntilCompleteResult(int(kernels.until_m_sets(rng.state, int(n), int(m))))


def samples_until_complete(n, rng: RngStream):
    return samples_until_m_sets(n, 1, rng)


def until_complete_batch(n, m, trials, seed, start=0):
    """Sample counts for trials ``start..start+trials-1``; trial ``i`` uses ``RngStream(seed, i)``."""
    if n < 1 or m < 1:
        raise DomainError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    seed = check_seed(seed)
    return kernels.until_m_sets_batch(seed, int(start), int(start + trials), int(n), int(m))


def empirical_cdf(results, thresholds):
    """Fraction of results with ``samples_used <= t`` for each threshold ``t``."""
    xs = np.sort(np.array([getattr(r, "samples_used", r) for r in results], dtype=np.int64))
    if xs.size == 0:
        raise DomainError("empirical_cdf needs at least one result")
    idx = np.searchsorted(xs, np.asarray(thresholds, dtype=np.int64), side="right")
    return [int(k) / xs.size for k in idx]


def upper_tail(results, thresholds):
    """Fraction of results with ``samples_used >= t``."""
    xs = np.sort(np.array([getattr(r, "samples_used", r) for r in results], dtype=np.int64))
    if xs.size == 0:
        raise DomainError("upper_tail needs at least one result")
    idx = np.searchsorted(xs, np.asarray(thresholds, dtype=np.int64), side="left")
    return [(xs.size - int(k)) / xs.size for k in idx]


def lower_threshold(n, c):
    """floor(n (ln n - c))"""
    return int(math.floor(n * (math.log(n) - c)))


def upper_threshold(n, c):
    """floor(n (ln n + c))"""
    return int(math.floor(n * (math.log(n) + c)))


def limit_law_check(samples, n, cs=(-1.0, 0.0, 1.0)):
    """Empirical lower/upper tails next to their double-exponential limits."""
    rows = []
    for c in cs:
        lo_t, hi_t = lower_threshold(n, c), upper_threshold(n, c)
        lo = empirical_cdf(samples, [lo_t])[0]
        hi = upper_tail(samples, [hi_t])[0]
        rows.append({
            "c": c,
            "lower_threshold": lo_t,
            "empirical_lower": lo,
            "limit_lower": bounds.er_limit_lower(c),
            "upper_threshold": hi_t,
            "empirical_upper": hi,
            "limit_upper": bounds.er_limit_upper(c),
        })
    return rows


def resolve_m_rule(rule, n, const=1):
    """Number of full sets required as a function of ``n``."""
    if rule == "const":
        return int(const)
    if rule == "log_n":
        return max(1, math.ceil(math.log(n)))
    if rule == "sqrt_n":
        return max(1, math.ceil(math.sqrt(n)))
    if rule == "linear_n":
        return int(n)
    raise ValueError(f"unknown m rule {rule!r}; expected one of {M_RULES}")
