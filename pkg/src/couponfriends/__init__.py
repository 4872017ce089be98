"""Coupon collecting with friends.

Monte Carlo engine, exact small-instance oracles, closed-form bounds and an
experiment harness for ``m`` collectors who sample coupons uniformly and
then swap duplicates in random pairwise meetings.
"""
__version__ = "0.1.0"

from .kernels import BACKEND
from .rng import GENERATOR, RngStream
from .sim import (
    DomainError,
    InteractionRecord,
    PhasePlan,
    Population,
    StrategyId,
    Transfer,
    TrialOutcome,
    apply_strategy,
    is_complete,
    missing_pairs,
    new_population,
    run_collection_phase,
    run_exchange_phase,
    run_trial,
    sample_pair,
)

__all__ = [
    "BACKEND",
    "GENERATOR",
    "DomainError",
    "InteractionRecord",
    "PhasePlan",
    "Population",
    "RngStream",
    "StrategyId",
    "Transfer",
    "TrialOutcome",
    "apply_strategy",
    "is_complete",
    "missing_pairs",
    "new_population",
    "run_collection_phase",
    "run_exchange_phase",
    "run_trial",
    "sample_pair",
]
