"""Closed-form round-count bounds and limit laws (natural logarithms).

Real-valued bounds are turned into round counts by taking the ceiling;
collection bounds are additionally clamped to at least one sample.
"""
import math
from dataclasses import dataclass, field

from .sim import DomainError


def _check(n, m):
    if n < 1 or m < 1:
        raise DomainError(f"need n >= 1 and m >= 1, got n={n}, m={m}")


def _ceil(x):
    return int(math.ceil(x))


def rc_no_exchange_ub(n, m):
    """Samples per collector so that, without exchanges, all finish w.p. >= 1 - 1/(mn)."""
    _check(n, m)
    return max(1, _ceil(2 * n * math.log(m * n)))


def rc_unlimited_ub(n, m):
    _check(n, m)
    return max(1, _ceil(16 * (n + n * math.log(n) / m)))


def rc_main_ub(n, m):
    _check(n, m)
    return max(1, _ceil(36 * (n + n * math.log(n) / m)))


def re_main_ub(n, m):
    """Interactions sufficient under surplus-to-needy once ``r_c >= rc_main_ub``."""
    _check(n, m)
    return _ceil(6 * m * math.log(m * n))


def quarter_nlogn(n, m=1):
    _check(n, m)
    return int(math.floor(n * math.log(n) / 4))


def quarter_nlog2m(n, m):
    _check(n, m)
    return int(math.floor(n * math.log2(m) / 4))


def er_limit_lower(c):
    """Limit of P(X <= n(ln n - c)) for the single-collector sample count X."""
    return math.exp(-math.exp(c))


def er_limit_upper(c):
    """Limit of P(X >= n(ln n + c))."""
    return -math.expm1(-math.exp(-c))


def newman_shepp_expectation(n, m):
    """n (ln n + (m - 1) ln ln n), the expected draws for m full sets minus its O(n) term."""
    if n < 3:
        raise DomainError("newman_shepp_expectation needs n >= 3 (ln ln n > 0)")
    if m < 1:
        raise DomainError("m must be >= 1")
    return n * (math.log(n) + (m - 1) * math.log(math.log(n)))


FORMULAS = {
    "rc_no_exchange_ub": "ceil(2 n ln(mn)), min 1",
    "rc_unlimited_ub": "ceil(16 (n + n ln n / m)), min 1",
    "rc_main_ub": "ceil(36 (n + n ln n / m)), min 1",
    "re_main_ub": "ceil(6 m ln(mn))",
}


@dataclass(frozen=True)
class BoundReport:
    n: int
    m: int
    rc_no_exchange_ub: int
    rc_unlimited_ub: int
    rc_main_ub: int
    re_main_ub: int
    formulas: dict = field(default_factory=lambda: dict(FORMULAS))

    def as_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "rc_no_exchange_ub": self.rc_no_exchange_ub,
            "rc_unlimited_ub": self.rc_unlimited_ub,
            "rc_main_ub": self.rc_main_ub,
            "re_main_ub": self.re_main_ub,
            "formulas": dict(self.formulas),
        }

    def to_text(self):
        width = max(len(k) for k in FORMULAS)
        lines = [f"n = {self.n}, m = {self.m}"]
        for key, formula in self.formulas.items():
            lines.append(f"{key:<{width}}  {getattr(self, key):>10}  {formula}")
        return "\n".join(lines)


def bound_report(n, m):
    return BoundReport(
        n=n,
        m=m,
        rc_no_exchange_ub=rc_no_exchange_ub(n, m),
        rc_unlimited_ub=rc_unlimited_ub(n, m),
        rc_main_ub=rc_main_ub(n, m),
        re_main_ub=re_main_ub(n, m),
    )
