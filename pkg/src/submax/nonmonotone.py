"""Cardinality-constrained non-monotone maximization over a threshold grid.

Runs the early-exit threshold sampler at logarithmically many thresholds
bracketing the optimum scale (all logically in parallel), falls back to
unconstrained maximization on the surviving pool whenever the sampler exits
because the pool got small, trims oversized fallbacks by uniform downsampling
and a best-prefix pass, and returns the best set seen anywhere.

Reported adaptivity is the maximum over threshold trials plus one round for
the initial singleton sweep; reported queries are summed over trials.

The trade-off constants default to c1=1/7, c3=3, tuned for a one-round
unconstrained subroutine with a 1/4 approximation factor. Swapping in a
stronger (1/2 - eps) unconstrained routine would pair with c1=0.198989,
c3=3.556; both constants are plain parameters here so that variant can be
plugged in later.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .oracle import (
    Objective,
    QueryLedger,
    Subset,
    evaluate_batch,
    sample_without_replacement,
    spawn_seeds,
)
from .threshold import (
    BreakReason,
    SamplingOutcome,
    ThresholdParams,
    threshold_sampling,
)
from .unconstrained import UnconstrainedParams, unconstrained_max


@dataclass(frozen=True)
class DerivedNonmonotoneValues:
    eps_hat: float
    r: int
    delta_hat: float
    break_size: int


@dataclass
class NonmonotoneParams:
    """Inputs for one full run; c1 and c3 are the tuned trade-off constants."""

    k: int
    eps: float
    delta: float
    c1: float = 1.0 / 7.0
    c3: float = 3.0
    sample_override: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0,1), got {self.eps}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0,1), got {self.delta}")
        if not 0.0 < self.c1 < 1.0:
            raise ValueError(f"c1 must lie in (0,1), got {self.c1}")
        if self.c3 <= 1.0:
            raise ValueError(f"c3 must exceed 1, got {self.c3}")

    def derive(self) -> DerivedNonmonotoneValues:
        eps_hat = self.eps / 6.0
        r = math.ceil(2.0 * math.log(self.k) / eps_hat)
        delta_hat = self.delta / (2.0 * (r + 1))
        return DerivedNonmonotoneValues(eps_hat=eps_hat, r=r, delta_hat=delta_hat,
                                        break_size=math.ceil(self.c3 * self.k))


@dataclass
class ThresholdTrial:
    """One threshold's full story: sampler outcome plus any fallback sets.

    The unconstrained fields are populated exactly when the sampler exited
    with break_reason small_A.
    """

    index: int
    tau: float
    outcome: SamplingOutcome
    unconstrained_set: Subset | None = None
    downsampled: Subset | None = None
    prefix_set: Subset | None = None
    prefix_value: float | None = None
    prefix_round: int | None = None
    best_local: Subset = field(default_factory=Subset)
    best_local_value: float = 0.0


def max_singleton(f: Objective, ledger: QueryLedger) -> float:
    """Largest single-element value, via one round of n singleton queries."""
    singles = [np.array([x], dtype=np.int64) for x in range(f.n)]
    values = evaluate_batch(f, singles, ledger)
    return float(values.max())


def downsample(u: Subset, k: int, rng: np.random.Generator) -> Subset:
    """Uniform k-subset of u when it is oversized, otherwise u unchanged."""
    if len(u) <= k:
        return u
    return Subset(sample_without_replacement(rng, u.to_array(), k))


def _best_prefix_valued(f: Objective, u_prime: Subset,
                        rng: np.random.Generator,
                        ledger: QueryLedger) -> tuple[Subset, float]:
    """Best prefix of a uniform random ordering of u_prime, with its value.

    Evaluates the empty prefix and all |u_prime| proper prefixes in one
    adaptive round; ties go to the shortest prefix.
    """
    order = rng.permutation(u_prime.to_array())
    prefixes = [order[:i] for i in range(order.size + 1)]
    values = evaluate_batch(f, prefixes, ledger)
    best = int(np.argmax(values))
    return Subset(prefixes[best]), float(values[best])


def best_prefix(f: Objective, u_prime: Subset, rng: np.random.Generator,
                ledger: QueryLedger) -> Subset:
    chosen, _ = _best_prefix_valued(f, u_prime, rng, ledger)
    return chosen


def threshold_grid(delta_star: float, params: NonmonotoneParams) -> list[float]:
    """The geometric threshold grid c1 * (1+eps_hat)^i * delta_star / k."""
    d = params.derive()
    return [params.c1 * (1.0 + d.eps_hat) ** i * delta_star / params.k
            for i in range(d.r + 1)]


def adaptive_nonmonotone_max(
        f: Objective, params: NonmonotoneParams,
        seed: int | np.random.SeedSequence,
) -> tuple[Subset, QueryLedger, list[ThresholdTrial]]:
    """Full run: singleton sweep, parallel threshold trials, final argmax.

    Takes a seed rather than a generator so each trial can own an independent
    stream derived by mixing its index; the whole run is reproducible and the
    trials could execute concurrently. The final argmax reuses values paid for
    when each candidate set was formed, so it costs no fresh queries.
    """
    d = params.derive()
    head = QueryLedger()
    delta_star = max_singleton(f, head)
    if delta_star <= 0.0:
        return Subset(), head, []

    trial_seeds = spawn_seeds(seed, d.r + 1)
    unc_params = UnconstrainedParams(eps=d.eps_hat, delta=d.delta_hat)
    trials: list[ThresholdTrial] = []
    for i in range(d.r + 1):
        rng = np.random.default_rng(trial_seeds[i])
        tau = params.c1 * (1.0 + d.eps_hat) ** i * delta_star / params.k
        led = QueryLedger()
        tp = ThresholdParams(k=params.k, tau=tau, eps=d.eps_hat,
                             delta=d.delta_hat, break_size=d.break_size,
                             sample_override=params.sample_override)
        outcome = threshold_sampling(f, tp, rng, ledger=led)
        trial = ThresholdTrial(index=i, tau=tau, outcome=outcome)
        trial.best_local, trial.best_local_value = outcome.s, outcome.f_s
        if outcome.break_reason is BreakReason.SMALL_A:
            u = unconstrained_max(f, outcome.a, unc_params, rng, led)
            u_prime = downsample(u, params.k, rng)
            u_pp, u_val = _best_prefix_valued(f, u_prime, rng, led)
            trial.unconstrained_set = u
            trial.downsampled = u_prime
            trial.prefix_set = u_pp
            trial.prefix_value = u_val
            trial.prefix_round = led.rounds
            if u_val > trial.best_local_value:
                trial.best_local, trial.best_local_value = u_pp, u_val
        trials.append(trial)

    best = Subset()
    best_value = trials[0].outcome.f_empty
    for trial in trials:
        if trial.outcome.f_s > best_value:
            best, best_value = trial.outcome.s, trial.outcome.f_s
        if trial.prefix_value is not None and trial.prefix_value > best_value:
            best, best_value = trial.prefix_set, trial.prefix_value

    merged = QueryLedger.merge_parallel([t.outcome.ledger for t in trials])
    ledger = QueryLedger()
    ledger.add_round(head.per_round[0][1])
    for _, q in merged.per_round:
        ledger.add_round(q)
    ledger.logical_samples = head.logical_samples + merged.logical_samples
    return best, ledger, trials
