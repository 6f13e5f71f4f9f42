import math

import numpy as np
import pytest

from submax import (
    ModularObjective,
    QueryLedger,
    Subset,
    UnconstrainedParams,
    brute_force_opt,
    evaluate_offline,
    generate_synthetic,
    make_rng,
    unconstrained_max,
)


class TestParams:
    def test_iteration_bound_example(self):
        p = UnconstrainedParams(eps=0.25, delta=0.05)
        assert p.t == 11  # ceil(log(20)/log(4/3))

    def test_large_eps_flagged(self):
        with pytest.warns(UserWarning):
            UnconstrainedParams(eps=0.3, delta=0.1)

    def test_validation(self):
        with pytest.raises(ValueError):
            UnconstrainedParams(eps=0.0, delta=0.1)
        with pytest.raises(ValueError):
            UnconstrainedParams(eps=0.1, delta=1.0)


class TestUnconstrainedMax:
    def test_singleton_pool_modular(self):
        f = ModularObjective([1.0])
        p = UnconstrainedParams(eps=0.25, delta=0.05)
        out = unconstrained_max(f, Subset([0]), p, make_rng(0), QueryLedger())
        assert out == Subset([0])

    def test_output_subset_of_pool(self):
        f = generate_synthetic("revenue", 15, 0.3, seed=2).objective()
        pool = Subset([1, 3, 4, 8, 9, 12])
        p = UnconstrainedParams(eps=0.2, delta=0.1)
        for seed in range(10):
            out = unconstrained_max(f, pool, p, make_rng(seed), QueryLedger())
            assert set(out.indices) <= set(pool.indices)

    def test_ledger_one_round_t_queries(self):
        f = ModularObjective(np.ones(6))
        p = UnconstrainedParams(eps=0.2, delta=0.1)
        led = QueryLedger()
        unconstrained_max(f, Subset(range(6)), p, make_rng(1), led)
        assert led.rounds == 1
        assert led.total_queries == p.t

    def test_empty_pool_rejected(self):
        f = ModularObjective([1.0])
        p = UnconstrainedParams(eps=0.2, delta=0.1)
        with pytest.raises(ValueError):
            unconstrained_max(f, Subset(), p, make_rng(0), QueryLedger())

    def test_include_empty_candidate(self):
        # A function where almost every nonempty draw scores below the empty
        # set: modular with zero weights ties, so empty never wins strictly.
        f = ModularObjective(np.zeros(4))
        p = UnconstrainedParams(eps=0.2, delta=0.1)
        out = unconstrained_max(f, Subset(range(4)), p, make_rng(0),
                                QueryLedger(), include_empty=True,
                                empty_value=0.0)
        assert evaluate_offline(f, out) == 0.0

    def test_quarter_approximation_statistics(self):
        eps, delta, runs = 0.2, 0.1, 300
        p = UnconstrainedParams(eps=eps, delta=delta)
        threshold = (1 - delta) - 3 * math.sqrt(delta * (1 - delta) / runs)
        for kind, n, param, seed in (("revenue", 10, 0.4, 3),
                                     ("synthetic-cut", 10, 0.4, 4),
                                     ("movie", 10, None, 5)):
            f = generate_synthetic(kind, n, param, seed=seed).objective()
            _, opt = brute_force_opt(f, n)
            pool = Subset(range(n))
            hits = 0
            for i in range(runs):
                out = unconstrained_max(f, pool, p, make_rng(i), QueryLedger())
                hits += evaluate_offline(f, out) >= (0.25 - eps) * opt
            assert hits / runs >= threshold
