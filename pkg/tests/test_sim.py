import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brute import give_surplus
from couponfriends.rng import RngStream
from couponfriends.sim import (
    DomainError,
    PhasePlan,
    Population,
    StrategyId,
    Transfer,
    apply_strategy,
    commit,
    is_complete,
    missing_pairs,
    new_population,
    run_collection_phase,
    run_exchange_phase,
    run_trial,
    sample_pair,
    sample_pairs,
)
from couponfriends.stats import Z999, chi_square_uniform, wilson_interval

S2N = StrategyId.SURPLUS_TO_NEEDY


def test_new_population():
    assert missing_pairs(new_population(4, 3)) == 12
    assert missing_pairs(new_population(1, 1)) == 1
    with pytest.raises(DomainError):
        new_population(0, 2)
    with pytest.raises(DomainError):
        new_population(2, 0)


def test_collection_single_coupon_type():
    pop = run_collection_phase(new_population(1, 2), 3, RngStream(0))
    assert pop.counts.tolist() == [[3], [3]]


def test_collection_zero_samples():
    pop = run_collection_phase(new_population(2, 1), 0, RngStream(0))
    assert pop.counts.tolist() == [[0, 0]]


def test_collection_is_additive():
    pop = run_collection_phase(new_population(5, 3), 4, RngStream(1))
    run_collection_phase(pop, 6, RngStream(2))
    assert pop.counts.sum(axis=1).tolist() == [10, 10, 10]


def test_collection_draws_uniform():
    pop = run_collection_phase(new_population(2, 1), 10**6, RngStream(11))
    c0, c1 = pop.counts[0]
    assert abs(c0 / 10**6 - 0.5) < 0.002
    assert chi_square_uniform(pop.counts[0]) > 0.001


def test_collection_draws_uniform_many_types():
    pop = run_collection_phase(new_population(10, 1), 10**6, RngStream(12))
    assert chi_square_uniform(pop.counts[0]) > 0.001


def test_sample_pair_m2_always_same():
    rng = RngStream(3)
    assert {sample_pair(2, rng) for _ in range(100)} == {(0, 1)}


def test_sample_pair_m3_uniform():
    pairs = sample_pairs(3, 10**6, RngStream(4))
    assert (pairs[:, 0] < pairs[:, 1]).all()
    codes = pairs[:, 0] * 3 + pairs[:, 1]
    counts = [np.count_nonzero(codes == c) for c in (1, 2, 5)]
    assert sum(counts) == 10**6
    assert chi_square_uniform(counts) > 0.001
    for k in counts:
        lo, hi = wilson_interval(k, 10**6, Z999)
        assert lo <= 1 / 3 <= hi


def test_sample_pair_needs_two():
    with pytest.raises(DomainError):
        sample_pair(1, RngStream(0))


def test_surplus_single_transfer():
    t = apply_strategy(S2N, [3, 0, 1], [0, 1, 1])
    assert t == [Transfer(0, 0, 1)]
    pop = commit(Population.from_counts([[3, 0, 1], [0, 1, 1]]), t)
    assert pop.counts.tolist() == [[2, 0, 1], [1, 1, 1]]


def test_surplus_both_directions():
    t = apply_strategy(S2N, [2, 0], [0, 2])
    assert t == [Transfer(0, 0, 1), Transfer(1, 1, 0)]
    pop = commit(Population.from_counts([[2, 0], [0, 2]]), t)
    assert pop.counts.tolist() == [[1, 1], [1, 1]]


def test_null_never_transfers():
    assert apply_strategy(StrategyId.NULL, [5, 0], [0, 5]) == []


def test_apply_strategy_is_pure():
    a, b = [2, 0], [0, 2]
    apply_strategy(S2N, a, b)
    assert a == [2, 0] and b == [0, 2]


def test_mutual_barter_swaps_one_each_way():
    t = apply_strategy(StrategyId.MUTUAL_BARTER, [3, 0, 2], [0, 2, 0])
    # coupon 0 for coupon 1; coupon 2 finds no partner left
    assert t == [Transfer(0, 0, 1), Transfer(1, 1, 0)]
    assert apply_strategy(StrategyId.MUTUAL_BARTER, [2, 0], [0, 1]) == []


def test_strategy_parse():
    assert StrategyId.parse("surplus-to-needy") is S2N
    assert StrategyId.parse("Null") is StrategyId.NULL
    with pytest.raises(ValueError):
        StrategyId.parse("Telepathy")


def test_exchange_zero_rounds_unchanged():
    pop = Population.from_counts([[2, 0], [0, 1]])
    run_exchange_phase(pop, 0, S2N, RngStream(0))
    assert pop.counts.tolist() == [[2, 0], [0, 1]]


def test_exchange_forced_single_coupon():
    pop = Population.from_counts([[2], [0]])
    _, trace = run_exchange_phase(pop, 1, S2N, RngStream(0), record_trace=True)
    assert pop.counts.tolist() == [[1], [1]]
    assert is_complete(pop)
    assert trace[0].pair == (0, 1) and trace[0].transfers == (Transfer(0, 0, 1),)


def test_exchange_forced_two_coupons():
    pop = Population.from_counts([[2, 2], [0, 0]])
    run_exchange_phase(pop, 1, S2N, RngStream(0))
    assert pop.counts.tolist() == [[1, 1], [1, 1]]


def test_exchange_needs_two_collectors():
    with pytest.raises(DomainError):
        run_exchange_phase(new_population(3, 1), 1, S2N, RngStream(0))
    run_exchange_phase(new_population(3, 1), 0, S2N, RngStream(0))


def test_missing_pairs_and_completeness():
    assert missing_pairs(Population.from_counts([[1, 0], [0, 2]])) == 2
    assert missing_pairs(Population.from_counts([[1, 3], [2, 1]])) == 0
    assert is_complete(Population.from_counts([[1, 1], [1, 1]]))
    assert not is_complete(Population.from_counts([[1, 1], [1, 0]]))
    assert is_complete(Population.from_counts([[5]]))


def test_trial_examples():
    for i in range(50):
        assert run_trial(1, 1, PhasePlan(1, 0), RngStream(0, i)).all_complete
        o = run_trial(1, 2, PhasePlan(0, 7), RngStream(0, i))
        assert not o.all_complete and o.missing_pairs_final == 2


def test_trial_two_by_two_matches_quarter():
    wins = sum(run_trial(2, 2, PhasePlan(2, 0, StrategyId.NULL), RngStream(5, i)).all_complete
               for i in range(20000))
    lo, hi = wilson_interval(wins, 20000, Z999)
    assert lo <= 0.25 <= hi


def test_plan_validation():
    with pytest.raises(DomainError):
        PhasePlan(-1, 0)
    with pytest.raises(ValueError):
        PhasePlan(1, 1, "Telepathy")
    with pytest.raises(DomainError):
        run_trial(3, 1, PhasePlan(3, 1), RngStream(0))


# -- properties ---------------------------------------------------------------

counts_vec = st.lists(st.integers(0, 4), min_size=1, max_size=8)


@given(counts_vec, st.data(), st.sampled_from(list(StrategyId)))
def test_apply_strategy_properties(a, data, strategy):
    b = data.draw(st.lists(st.integers(0, 4), min_size=len(a), max_size=len(a)))
    moves = apply_strategy(strategy, a, b)
    pop = commit(Population.from_counts([a, b]), moves)
    assert (pop.counts >= 0).all()
    assert (pop.counts.sum(axis=0) == np.add(a, b)).all()
    if strategy is S2N:
        # matches an independent implementation of the rule
        assert pop.counts.tolist() == [list(x) for x in give_surplus(a, b)]
        rows = [a, b]
        for t in moves:
            assert rows[t.giver][t.coupon] >= 2 and rows[t.receiver][t.coupon] == 0
        assert (pop.counts[[t.giver for t in moves], [t.coupon for t in moves]] >= 1).all()
    if strategy is StrategyId.NULL:
        assert moves == []


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 6),
    m=st.integers(2, 6),
    r_c=st.integers(0, 12),
    r_e=st.integers(0, 40),
    strategy=st.sampled_from(list(StrategyId)),
    seed=st.integers(0, 2**64 - 1),
)
def test_exchange_invariants(n, m, r_c, r_e, strategy, seed):
    rng = RngStream(seed)
    pop = run_collection_phase(new_population(n, m), r_c, rng)
    assert (pop.counts.sum(axis=1) == r_c).all()
    start = pop.counts.copy()
    before = missing_pairs(pop)
    _, trace = run_exchange_phase(pop, r_e, strategy, rng, record_trace=True)
    assert len(trace) == r_e
    assert (pop.counts.sum(axis=0) == start.sum(axis=0)).all()

    good0 = (start >= 2).sum(axis=0)
    zero0 = (start == 0).sum(axis=0)
    replay = start.copy()
    missing = before
    for rec in trace:
        i, j = rec.pair
        assert i < j
        for t in rec.transfers:
            assert {t.giver, t.receiver} == {i, j}
            if strategy is S2N:
                assert replay[t.giver, t.coupon] >= 2 and replay[t.receiver, t.coupon] == 0
            replay[t.giver, t.coupon] -= 1
            replay[t.receiver, t.coupon] += 1
            assert replay[t.giver, t.coupon] >= (1 if strategy is S2N else 0)
        now = int((replay == 0).sum())
        if strategy is S2N:
            assert now == missing - len(rec.transfers)
            assert ((replay >= 2).sum(axis=0) >= good0 - zero0).all()
        elif strategy is StrategyId.NULL:
            assert now == missing
        missing = now
    assert (replay == pop.counts).all()


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 5), m=st.integers(2, 5), r_c=st.integers(0, 10),
       r_e=st.integers(0, 30), seed=st.integers(0, 2**32))
def test_trial_outcome_invariants(n, m, r_c, r_e, seed):
    o = run_trial(n, m, PhasePlan(r_c, r_e), RngStream(seed))
    assert o.all_complete == all(o.per_collector_complete) == (o.missing_pairs_final == 0)
    assert 0 <= o.missing_pairs_final <= o.missing_pairs_after_collection <= m * n
    assert len(o.per_collector_complete) == m
    again = run_trial(n, m, PhasePlan(r_c, r_e), RngStream(seed))
    assert again == o
