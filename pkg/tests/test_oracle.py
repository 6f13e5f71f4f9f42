import numpy as np
import pytest

from submax import (
    CutObjective,
    InvalidSubsetError,
    ModularObjective,
    QueryLedger,
    RevenueObjective,
    Subset,
    WeightedGraph,
    batch_marginals,
    batch_pair_gains,
    evaluate_batch,
    evaluate_offline,
    make_rng,
    sample_without_replacement,
    spawn_seeds,
)


def path_graph():
    return WeightedGraph(n=3, edges=[(0, 1, 1.0), (1, 2, 1.0)])


class TestSubset:
    def test_dedup_and_order(self):
        s = Subset([3, 1, 3, 0])
        assert s.indices == (0, 1, 3)
        assert len(s) == 3
        assert 1 in s and 2 not in s

    def test_union_and_add(self):
        s = Subset([0]).union([2, 1]).add(2)
        assert s.indices == (0, 1, 2)

    def test_hash_eq(self):
        assert Subset([1, 2]) == Subset([2, 1])
        assert hash(Subset([1, 2])) == hash(Subset([2, 1]))
        assert Subset([1]) != Subset([1, 2])

    def test_negative_index_rejected(self):
        with pytest.raises(InvalidSubsetError):
            Subset([-1])


class TestEvaluateBatch:
    def test_modular_example(self):
        f = ModularObjective([1.0, 2.0, 3.0])
        led = QueryLedger()
        vals = evaluate_batch(f, [Subset([0]), Subset([0, 1]), Subset()], led)
        assert list(vals) == [1.0, 3.0, 0.0]
        assert led.rounds == 1
        assert led.total_queries == 3

    def test_empty_set_single_query(self):
        f = ModularObjective([5.0])
        led = QueryLedger()
        vals = evaluate_batch(f, [Subset()], led)
        assert vals[0] == 0.0
        assert (led.rounds, led.total_queries) == (1, 1)

    def test_path_cut_counts_both_incident_edges(self):
        f = CutObjective(path_graph())
        led = QueryLedger()
        vals = evaluate_batch(f, [Subset([1])], led)
        assert vals[0] == 2.0

    def test_out_of_range_rejected(self):
        f = ModularObjective([1.0, 2.0])
        with pytest.raises(InvalidSubsetError):
            evaluate_batch(f, [Subset([2])], QueryLedger())

    def test_duplicate_array_query_rejected(self):
        f = ModularObjective([1.0, 2.0, 3.0])
        with pytest.raises(InvalidSubsetError):
            evaluate_batch(f, [np.array([1, 1])], QueryLedger())

    def test_empty_batch_rejected(self):
        f = ModularObjective([1.0])
        with pytest.raises(ValueError):
            evaluate_batch(f, [], QueryLedger())

    def test_array_queries_match_subsets(self):
        g = WeightedGraph(n=5, edges=[(0, 1, 0.3), (1, 2, 0.7), (2, 4, 1.1)])
        f = RevenueObjective(g)
        queries = [np.array([2, 0]), np.array([4]), np.array([], dtype=np.int64)]
        vals = evaluate_batch(f, queries, QueryLedger())
        for q, v in zip(queries, vals):
            assert v == pytest.approx(evaluate_offline(f, Subset(q)), abs=1e-12)


class TestBatchMarginals:
    def test_modular_marginals_equal_weights(self):
        f = ModularObjective([1.0, 2.0, 3.0])
        led = QueryLedger()
        gains = batch_marginals(f, Subset(), [0, 1, 2], 0.0, led)
        assert list(gains) == [1.0, 2.0, 3.0]
        assert (led.rounds, led.total_queries) == (1, 3)

    def test_readding_member_is_zero(self):
        f = ModularObjective([1.0, 2.0, 3.0])
        gains = batch_marginals(f, Subset([0]), [0], 1.0, QueryLedger())
        assert gains[0] == 0.0

    def test_revenue_two_node_marginal(self):
        f = RevenueObjective(WeightedGraph(n=2, edges=[(0, 1, 1.0)]))
        gains = batch_marginals(f, Subset(), [0], 0.0, QueryLedger())
        assert gains[0] == pytest.approx(1.0)

    def test_matches_offline_differences(self):
        g = WeightedGraph(n=6, edges=[(0, 1, 0.5), (1, 2, 0.9), (3, 4, 0.2),
                                      (0, 5, 1.3), (2, 5, 0.4)])
        f = CutObjective(g)
        base = Subset([0, 3])
        base_val = evaluate_offline(f, base)
        gains = batch_marginals(f, base, range(6), base_val, QueryLedger())
        for x in range(6):
            expect = evaluate_offline(f, base.add(x)) - base_val
            assert gains[x] == pytest.approx(expect, abs=1e-9)


class TestBatchPairGains:
    def test_fast_path_matches_generic(self):
        g = WeightedGraph(n=7, edges=[(0, 1, 0.5), (1, 2, 0.9), (3, 4, 0.2),
                                      (0, 5, 1.3), (2, 6, 0.4), (5, 6, 0.8)])
        fast = RevenueObjective(g)

        class SlowRevenue(RevenueObjective):
            def _gain_batch(self, base_idx, t_mat, xs):
                return None

        slow = SlowRevenue(g)
        base = Subset([3])
        t_mat = np.array([[0, 1], [2, 5], [1, 6], [0, 6]])
        xs = np.array([2, 6, 0, 3])  # last row: x already in base
        got = batch_pair_gains(fast, base, t_mat, xs, QueryLedger())
        want = batch_pair_gains(slow, base, t_mat, xs, QueryLedger())
        assert np.allclose(got, want, atol=1e-9)
        assert got[3] == 0.0

    def test_ledger_counts_two_per_sample(self):
        f = ModularObjective(np.ones(4))
        led = QueryLedger()
        batch_pair_gains(f, Subset(), np.empty((5, 0), dtype=np.int64),
                         np.arange(4)[[0, 1, 2, 3, 0]], led)
        assert led.rounds == 1
        assert led.total_queries == 10
        assert led.logical_samples == 5


class TestQueryLedger:
    def test_conservation(self):
        led = QueryLedger()
        led.add_round(3)
        led.add_round(7, logical_samples=2)
        assert led.total_queries == sum(q for _, q in led.per_round) == 10
        assert led.rounds == len(led.per_round) == 2
        assert led.cumulative_queries() == [3, 10]
        assert led.logical_samples == 2

    def test_rejects_empty_round(self):
        with pytest.raises(ValueError):
            QueryLedger().add_round(0)

    def test_merge_parallel(self):
        a, b = QueryLedger(), QueryLedger()
        a.add_round(5)
        a.add_round(2)
        b.add_round(1)
        b.add_round(4)
        b.add_round(10)
        merged = QueryLedger.merge_parallel([a, b])
        assert merged.rounds == 3
        assert merged.total_queries == a.total_queries + b.total_queries
        assert [q for _, q in merged.per_round] == [6, 6, 10]


class TestRandomness:
    def test_identical_seed_identical_stream(self):
        a, b = make_rng(123), make_rng(123)
        assert np.array_equal(a.random(100), b.random(100))

    def test_spawned_streams_differ(self):
        kids = spawn_seeds(7, 3)
        draws = [np.random.default_rng(k).random(8) for k in kids]
        assert not np.array_equal(draws[0], draws[1])
        again = [np.random.default_rng(k).random(8) for k in spawn_seeds(7, 3)]
        for x, y in zip(draws, again):
            assert np.array_equal(x, y)

    def test_sample_without_replacement(self):
        pool = np.arange(10, 20)
        got = sample_without_replacement(make_rng(5), pool, 4)
        assert got.size == 4
        assert len(set(got.tolist())) == 4
        assert set(got.tolist()) <= set(pool.tolist())
        again = sample_without_replacement(make_rng(5), pool, 4)
        assert np.array_equal(got, again)
        everything = sample_without_replacement(make_rng(1), pool, 99)
        assert sorted(everything.tolist()) == list(range(10, 20))

    def test_sample_without_replacement_uniform_ish(self):
        pool = np.arange(5)
        rng = make_rng(0)
        counts = np.zeros(5)
        reps = 4000
        for _ in range(reps):
            for x in sample_without_replacement(rng, pool, 2):
                counts[x] += 1
        freq = counts / (2 * reps)
        assert np.all(np.abs(freq - 0.2) < 0.03)


def test_evaluate_offline_leaves_no_trace():
    f = ModularObjective([1.0, 2.0])
    assert evaluate_offline(f, Subset([1])) == 2.0
    assert evaluate_offline(f, [1, 0]) == 3.0
