import itertools

import numpy as np
import pytest

from submax import (
    CutObjective,
    GroundSetTooLargeError,
    ImageSummarizationObjective,
    Instance,
    ModularObjective,
    MovieRecommendationObjective,
    Objective,
    RevenueObjective,
    SimilarityMatrix,
    Subset,
    WeightedGraph,
    brute_force_opt,
    check_submodularity,
    evaluate_offline,
    generate_synthetic,
    load_edge_list,
    load_similarity_csv,
    save_edge_list,
    save_similarity_csv,
)
from submax.objectives import ParseError


def two_by_two():
    return SimilarityMatrix(np.array([[1.0, 0.5], [0.5, 1.0]]))


class SquaredCardinality(Objective):
    """Supermodular counterexample: f(S) = |S|^2."""

    def _evaluate(self, idx):
        return float(idx.size ** 2)


class TestImageObjective:
    def test_empty_is_zero(self):
        f = ImageSummarizationObjective(two_by_two())
        assert evaluate_offline(f, Subset()) == 0.0

    def test_single_and_pair(self):
        f = ImageSummarizationObjective(two_by_two())
        assert evaluate_offline(f, Subset([0])) == pytest.approx(1.0)
        assert evaluate_offline(f, Subset([0, 1])) == pytest.approx(0.5)

    def test_nonmonotone_witness(self):
        f = ImageSummarizationObjective(two_by_two())
        assert evaluate_offline(f, Subset([0])) > evaluate_offline(f, Subset([0, 1]))


class TestMovieObjective:
    def test_empty_is_zero(self):
        f = MovieRecommendationObjective(two_by_two(), 0.95)
        assert evaluate_offline(f, Subset()) == 0.0

    def test_single(self):
        f = MovieRecommendationObjective(two_by_two(), 0.95)
        assert evaluate_offline(f, Subset([0])) == pytest.approx(0.55)

    def test_lambda_one_is_cut_like(self):
        f = MovieRecommendationObjective(two_by_two(), 1.0)
        assert evaluate_offline(f, Subset([0])) == pytest.approx(0.5)

    def test_nonmonotone_witness(self):
        f = MovieRecommendationObjective(two_by_two(), 0.95)
        assert evaluate_offline(f, Subset([0])) > evaluate_offline(f, Subset([0, 1]))

    def test_lambda_bounds(self):
        with pytest.raises(ValueError):
            MovieRecommendationObjective(two_by_two(), 1.5)


class TestRevenueObjective:
    def test_examples(self):
        f = RevenueObjective(WeightedGraph(n=2, edges=[(0, 1, 1.0)]))
        assert evaluate_offline(f, Subset()) == 0.0
        assert evaluate_offline(f, Subset([0])) == pytest.approx(1.0)
        assert evaluate_offline(f, Subset([0, 1])) == 0.0  # non-monotone

    def test_sqrt_of_weight_sum(self):
        g = WeightedGraph(n=3, edges=[(0, 1, 4.0), (0, 2, 9.0)])
        f = RevenueObjective(g)
        # node 0 outside S={1,2} sees weight 13
        assert evaluate_offline(f, Subset([1, 2])) == pytest.approx(np.sqrt(13.0))


class TestGenerateSynthetic:
    def test_complete_graph_edge_count(self):
        inst = generate_synthetic("revenue", 4, 1.0, seed=7)
        assert len(inst.data.edges) == 6
        assert all(0.0 <= w < 1.0 for _, _, w in inst.data.edges)

    def test_expected_edge_count_band(self):
        inst = generate_synthetic("revenue", 100, 0.06, seed=1)
        assert 200 <= len(inst.data.edges) <= 400

    def test_deterministic(self):
        a = generate_synthetic("revenue", 30, 0.2, seed=9)
        b = generate_synthetic("revenue", 30, 0.2, seed=9)
        assert a.data.edges == b.data.edges
        c = generate_synthetic("image", 12, seed=4)
        d = generate_synthetic("image", 12, seed=4)
        assert np.array_equal(c.data.s, d.data.s)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            generate_synthetic("matroid", 5)

    def test_similarity_kinds_nonnegative(self):
        inst = generate_synthetic("movie", 20, seed=3)
        assert (inst.data.s >= 0).all()
        assert inst.lam == 0.95


class TestLoaders:
    def test_similarity_parse(self, tmp_path):
        p = tmp_path / "sim.csv"
        p.write_text("1,0.5\n0.5,1\n")
        m = load_similarity_csv(p)
        assert np.array_equal(m.s, np.array([[1.0, 0.5], [0.5, 1.0]]))

    def test_similarity_symmetrizes_by_averaging(self, tmp_path):
        p = tmp_path / "sim.csv"
        p.write_text("1,0.4\n0.6,1\n")
        m = load_similarity_csv(p)
        assert m.s[0, 1] == m.s[1, 0] == pytest.approx(0.5)

    def test_similarity_ragged_row(self, tmp_path):
        p = tmp_path / "sim.csv"
        p.write_text("1,0.5\n0.5\n")
        with pytest.raises(ParseError, match="line 2"):
            load_similarity_csv(p)

    def test_similarity_non_numeric(self, tmp_path):
        p = tmp_path / "sim.csv"
        p.write_text("1,x\n0.5,1\n")
        with pytest.raises(ParseError, match="line 1"):
            load_similarity_csv(p)

    def test_similarity_negative_warns(self, tmp_path):
        p = tmp_path / "sim.csv"
        p.write_text("1,-0.5\n-0.5,1\n")
        with pytest.warns(UserWarning):
            load_similarity_csv(p)

    def test_edge_list_parse(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("0,1,0.25\n")
        g = load_edge_list(p)
        assert g.n == 2
        assert g.edges == [(0, 1, 0.25)]

    def test_edge_list_self_loop(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("0,0,1.0\n")
        with pytest.raises(ParseError, match="line 1"):
            load_edge_list(p)

    def test_edge_list_negative_weight(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("0,1,0.5\n1,2,-0.1\n")
        with pytest.raises(ParseError, match="line 2"):
            load_edge_list(p)

    def test_edge_list_out_of_range_with_override(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("0,5,0.5\n")
        with pytest.raises(ParseError, match="line 1"):
            load_edge_list(p, n=3)

    def test_edge_list_duplicate_pair(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("0,1,0.5\n1,0,0.2\n")
        with pytest.raises(ParseError):
            load_edge_list(p)

    def test_similarity_round_trip_bit_exact(self, tmp_path):
        inst = generate_synthetic("image", 6, seed=13)
        f0 = ImageSummarizationObjective(inst.data)
        p = tmp_path / "sim.csv"
        save_similarity_csv(p, inst.data)
        f1 = ImageSummarizationObjective(load_similarity_csv(p))
        for size in range(7):
            for combo in itertools.combinations(range(6), size):
                s = Subset(combo)
                assert evaluate_offline(f0, s) == evaluate_offline(f1, s)

    def test_edge_list_round_trip_bit_exact(self, tmp_path):
        inst = generate_synthetic("revenue", 6, 0.6, seed=17)
        f0 = RevenueObjective(inst.data)
        p = tmp_path / "g.csv"
        save_edge_list(p, inst.data)
        f1 = RevenueObjective(load_edge_list(p, n=6))
        for size in range(7):
            for combo in itertools.combinations(range(6), size):
                s = Subset(combo)
                assert evaluate_offline(f0, s) == evaluate_offline(f1, s)


class TestBruteForce:
    def test_modular_top_k(self):
        f = ModularObjective([1.0, 2.0, 3.0])
        best, val = brute_force_opt(f, 2)
        assert best == Subset([1, 2])
        assert val == 5.0

    def test_revenue_tie_breaks_lexicographic(self):
        f = RevenueObjective(WeightedGraph(n=2, edges=[(0, 1, 1.0)]))
        best, val = brute_force_opt(f, 2)
        assert best == Subset([0])
        assert val == pytest.approx(1.0)

    def test_k_zero(self):
        f = ModularObjective([1.0, 2.0])
        best, val = brute_force_opt(f, 0)
        assert best == Subset()
        assert val == 0.0

    def test_guard(self):
        f = ModularObjective(np.ones(25))
        with pytest.raises(GroundSetTooLargeError):
            brute_force_opt(f, 3)


class TestCheckSubmodularity:
    def test_modular_has_no_violations(self):
        f = ModularObjective(np.linspace(0.5, 2.0, 8))
        report = check_submodularity(f, trials=500, seed=1)
        assert report.ok
        assert report.violations == 0

    def test_supermodular_detected(self):
        report = check_submodularity(SquaredCardinality(8), trials=500, seed=1)
        assert report.violations > 0
        assert not report.ok

    def test_experiment_objectives_clean(self):
        objectives = [
            generate_synthetic("image", 15, seed=2).objective(),
            generate_synthetic("movie", 15, seed=3).objective(),
            generate_synthetic("revenue", 15, 0.3, seed=4).objective(),
            generate_synthetic("synthetic-cut", 15, 0.3, seed=5).objective(),
        ]
        for f in objectives:
            report = check_submodularity(f, trials=1500, seed=6)
            assert report.ok, f"{type(f).__name__}: {report}"


def test_optimum_split_order_bound_small_instances():
    # On every sampled pair (A, S): dropping part of the optimum from A can
    # only shrink the loss f(.) - f(. + S) relative to the full optimum.
    rng = np.random.default_rng(0)
    for seed in range(3):
        f = generate_synthetic("revenue", 9, 0.4, seed=100 + seed).objective()
        star, _ = brute_force_opt(f, 3)
        star_set = set(star.indices)
        f_star = evaluate_offline(f, star)
        for mask in range(1 << len(star_set)):
            s2 = Subset([x for i, x in enumerate(sorted(star_set)) if not mask & (1 << i)])
            f_s2 = evaluate_offline(f, s2)
            for _ in range(40):
                s = Subset(np.flatnonzero(rng.random(9) < 0.4))
                lhs = f_s2 - evaluate_offline(f, s2.union(s))
                rhs = f_star - evaluate_offline(f, star.union(s))
                assert lhs <= rhs + 1e-9


class TestDataValidation:
    def test_similarity_must_be_square(self):
        with pytest.raises(ValueError):
            SimilarityMatrix(np.zeros((2, 3)))

    def test_similarity_must_be_symmetric(self):
        with pytest.raises(ValueError):
            SimilarityMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_graph_rejects_self_loop(self):
        with pytest.raises(ValueError):
            WeightedGraph(n=2, edges=[(0, 0, 1.0)])

    def test_graph_rejects_duplicate(self):
        with pytest.raises(ValueError):
            WeightedGraph(n=2, edges=[(0, 1, 1.0), (1, 0, 2.0)])

    def test_instance_kind_data_mismatch(self):
        with pytest.raises(ValueError):
            Instance(kind="revenue", data=two_by_two())

    def test_instance_objective_dispatch(self):
        inst = generate_synthetic("synthetic-cut", 8, 0.5, seed=1)
        assert isinstance(inst.objective(), CutObjective)
        assert inst.n == 8
