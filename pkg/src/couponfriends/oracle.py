"""Exact success probabilities for small instances, in rational arithmetic."""
from collections import defaultdict
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial

from . import _pykernels
from .sim import DomainError, StrategyId

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    def __init__(self, what, size, budget):
        super().__init__(f"{what}: enumeration size {size} exceeds budget {budget}")
        self.size = size
        self.budget = budget


@dataclass(frozen=True)
class ExactProbability:
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        if not 0 <= v <= 1:
            raise ValueError(f"probability out of range: {v}")
        object.__setattr__(self, "value", v)

    @property
    def numerator(self):
        return self.value.numerator

    @property
    def denominator(self):
        return self.value.denominator

    def decimal(self, digits=20):
        with localcontext() as ctx:
            ctx.prec = digits
            return str(Decimal(self.numerator) / Decimal(self.denominator))

    def __float__(self):
        return float(self.value)

    def __eq__(self, other):
        if isinstance(other, ExactProbability):
            return self.value == other.value
        return self.value == other

    def __hash__(self):
        return hash(self.value)

    def as_dict(self):
        return {
            "numerator": str(self.numerator),
            "denominator": str(self.denominator),
            "decimal": self.decimal(),
        }


def exact_single_collector_success(n, r_c):
    """P(r_c uniform draws over n types hit every type), by inclusion-exclusion."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if r_c < 0:
        raise DomainError("r_c must be >= 0")
    total = sum((-1) ** k * comb(n, k) * (n - k) ** r_c for k in range(n + 1))
    return ExactProbability(Fraction(total, n**r_c))


def exact_no_exchange_success(n, m, r_c):
    if m < 1:
        raise DomainError("m must be >= 1")
    return ExactProbability(exact_single_collector_success(n, r_c).value ** m)


def exact_all_coupons_at_least_m(n, m, T, budget=DEFAULT_BUDGET):
    """P(T uniform draws over n types give every type at least m copies).

    Counts sequences with ``N(c, t) = sum_{j>=m} C(t, j) N(c-1, t-j)``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if m < 0 or T < 0:
        raise DomainError("m and T must be >= 0")
    if n * T > budget:
        raise BudgetExceeded("exact_all_coupons_at_least_m", n * T, budget)
    prev = [1] + [0] * T
    for _ in range(n):
        cur = [0] * (T + 1)
        for t in range(T + 1):
            cur[t] = sum(comb(t, j) * prev[t - j] for j in range(m, t + 1))
        prev = cur
    return ExactProbability(Fraction(prev[T], n**T))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def two_phase_enumeration_size(n, m, r_c, r_e):
    configs = comb(r_c + n - 1, n - 1) ** m
    pairs = m * (m - 1) // 2
    return configs * pairs**r_e


def exact_two_phase_success(n, m, r_c, r_e, strategy, budget=DEFAULT_BUDGET):
    """Exact P(all collectors complete) for the full collection + exchange process.

    Exhaustive over joint collection outcomes and interaction sequences;
    identical populations are merged after every round, which leaves the
    result unchanged and keeps the work well under the enumeration size
    checked against ``budget``.
    """
    if n < 1 or m < 1:
        raise DomainError("need n >= 1 and m >= 1")
    if r_c < 0 or r_e < 0:
        raise DomainError("r_c and r_e must be >= 0")
    if r_e > 0 and m < 2:
        raise DomainError("exchange needs m >= 2 collectors")
    code = StrategyId.parse(strategy).code
    size = two_phase_enumeration_size(n, m, r_c, r_e)
    if size > budget:
        raise BudgetExceeded("exact_two_phase_success", size, budget)

    fact = factorial(r_c)
    single = []
    for comp in _compositions(r_c, n):
        w = fact
        for k in comp:
            w //= factorial(k)
        single.append((comp, w))

    # integer weights over a common denominator
    dist = {}
    for combo in product(single, repeat=m):
        w = 1
        for _, wk in combo:
            w *= wk
        dist[tuple(c for c, _ in combo)] = w
    denom = n ** (r_c * m)

    pairs = list(combinations(range(m), 2))
    for _ in range(r_e):
        nxt = defaultdict(int)
        for state, w in dist.items():
            for i, j in pairs:
                rows = [list(r) for r in state]
                _pykernels.interact(rows[i], rows[j], code)
                nxt[tuple(map(tuple, rows))] += w
        dist = nxt
        denom *= len(pairs)

    good = sum(w for state, w in dist.items() if all(min(r) > 0 for r in state))
    return ExactProbability(Fraction(good, denom))
