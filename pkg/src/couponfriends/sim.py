"""Two-phase coupon collecting with friends.

``m`` collectors each draw ``r_c`` uniform coupons out of ``n`` types, then
``r_e`` uniformly random unordered pairs of distinct collectors meet in
sequence and exchange copies according to a strategy.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import _pykernels, kernels
from .rng import RngStream


class DomainError(ValueError):
    """Raised when sizes or round counts are outside the model's domain."""


class StrategyId(Enum):
    NULL = "Null"
    SURPLUS_TO_NEEDY = "SurplusToNeedy"
    MUTUAL_BARTER = "MutualBarter"

    @property
    def code(self):
        return _CODES[self]

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).replace("-", "").replace("_", "").lower()
        for s in cls:
            if s.value.lower() == key:
                return s
        raise ValueError(
            f"unknown strategy {name!r}; expected one of {[s.value for s in cls]}"
        )


_CODES = {
    StrategyId.NULL: _pykernels.NULL,
    StrategyId.SURPLUS_TO_NEEDY: _pykernels.SURPLUS_TO_NEEDY,
    StrategyId.MUTUAL_BARTER: _pykernels.MUTUAL_BARTER,
}


@dataclass(frozen=True)
class PhasePlan:
    r_c: int
    r_e: int
    strategy: StrategyId = StrategyId.SURPLUS_TO_NEEDY

    def __post_init__(self):
        for name in ("r_c", "r_e"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
        object.__setattr__(self, "strategy", StrategyId.parse(self.strategy))


@dataclass(frozen=True)
class Transfer:
    coupon: int
    giver: int
    receiver: int

    def to_json(self):
        return {"coupon": self.coupon, "from": self.giver, "to": self.receiver}


@dataclass(frozen=True)
class InteractionRecord:
    round: int
    pair: tuple
    transfers: tuple = ()

    def to_json(self):
        return {
            "round": self.round,
            "pair": list(self.pair),
            "transfers": [t.to_json() for t in self.transfers],
        }


@dataclass
class Population:
    """Copy counts of ``n`` coupon types held by each of ``m`` collectors.

    ``counts[v, i]`` is the number of copies of coupon ``i`` held by
    collector ``v``; row ``v`` is that collector's CouponCounts.
    """

    n: int
    m: int
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if self.counts.shape != (self.m, self.n):
            raise DomainError(f"counts shape {self.counts.shape} != ({self.m}, {self.n})")
        if (self.counts < 0).any():
            raise DomainError("counts must be non-negative")

    @classmethod
    def from_counts(cls, rows: Sequence[Sequence[int]]):
        arr = np.array(rows, dtype=np.int64)
        if arr.ndim != 2 or arr.size == 0:
            raise DomainError("need a non-empty m x n table of counts")
        return cls(n=arr.shape[1], m=arr.shape[0], counts=arr)

    @property
    def collectors(self):
        return [row for row in self.counts]

    def coupon_totals(self):
        return self.counts.sum(axis=0)

    def copy(self):
        return Population(self.n, self.m, self.counts.copy())


@dataclass
class TrialOutcome:
    all_complete: bool
    per_collector_complete: tuple
    missing_pairs_after_collection: int
    missing_pairs_final: int
    trace: Optional[list] = None


def new_population(n, m):
    if n < 1 or m < 1:
        raise DomainError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    return Population(n, m, np.zeros((m, n), dtype=np.int64))


def run_collection_phase(pop, r_c, rng: RngStream):
    """Each collector adds ``r_c`` uniform draws, collector 0 first. In place."""
    if r_c < 0:
        raise DomainError("r_c must be >= 0")
    kernels.collect(rng.state, pop.counts, int(r_c))
    return pop


def sample_pair(m, rng: RngStream):
    """Uniform unordered pair ``(i, j)`` with ``i < j``."""
    if m < 2:
        raise DomainError("sampling a pair needs m >= 2")
    i, j = kernels.sample_pairs(rng.state, int(m), 1)[0]
    return int(i), int(j)


def sample_pairs(m, count, rng: RngStream):
    """``count`` successive pairs as an int64 array of shape (count, 2)."""
    if m < 2:
        raise DomainError("sampling a pair needs m >= 2")
    return kernels.sample_pairs(rng.state, int(m), int(count))


def apply_strategy(strategy, a, b, ia=0, ib=1):
    """Transfers one interaction between count vectors ``a`` and ``b`` produces.

    Pure: the inputs are not modified. Collector indices in the result are
    ``ia`` for ``a`` and ``ib`` for ``b``.
    """
    if len(a) != len(b):
        raise DomainError("count vectors differ in length")
    strategy = StrategyId.parse(strategy)
    ends = (ia, ib)
    moves = _pykernels.interact(list(map(int, a)), list(map(int, b)), strategy.code)
    return [Transfer(c, ends[s], ends[d]) for c, s, d in moves]


def commit(pop, transfers):
    for t in transfers:
        pop.counts[t.giver, t.coupon] -= 1
        pop.counts[t.receiver, t.coupon] += 1
    return pop


def run_exchange_phase(pop, r_e, strategy, rng: RngStream, record_trace=False):
    """Runs ``r_e`` interactions in place; returns ``(pop, trace or None)``."""
    if r_e < 0:
        raise DomainError("r_e must be >= 0")
    if r_e > 0 and pop.m < 2:
        raise DomainError("exchange needs m >= 2 collectors")
    strategy = StrategyId.parse(strategy)
    raw = [] if record_trace else None
    if r_e:
        kernels.exchange(rng.state, pop.counts, int(r_e), strategy.code, raw)
    if raw is None:
        return pop, None
    trace = [
        InteractionRecord(r, (i, j), tuple(Transfer(*t) for t in moves))
        for r, i, j, moves in raw
    ]
    return pop, trace


def missing_pairs(pop):
    return int(np.count_nonzero(pop.counts == 0))


def is_complete(pop):
    return missing_pairs(pop) == 0


def run_trial(n, m, plan: PhasePlan, rng: RngStream, record_trace=False):
    pop = new_population(n, m)
    if plan.r_e > 0 and m < 2:
        raise DomainError("exchange needs m >= 2 collectors")
    run_collection_phase(pop, plan.r_c, rng)
    before = missing_pairs(pop)
    _, trace = run_exchange_phase(pop, plan.r_e, plan.strategy, rng, record_trace)
    per = tuple(bool(x) for x in (pop.counts > 0).all(axis=1))
    return TrialOutcome(
        all_complete=all(per),
        per_collector_complete=per,
        missing_pairs_after_collection=before,
        missing_pairs_final=missing_pairs(pop),
        trace=trace,
    )
