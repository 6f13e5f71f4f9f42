"""Threshold sampling: filter candidates by marginal gain, add random blocks.

Given a threshold tau, the sampler repeatedly discards candidates whose gain
over the current solution falls below tau, estimates the largest block size t
whose random insertions still clear tau with frequency near 1, and adds a
uniform random t-block. An optional break_size turns it into the early-exit
variant that stops as soon as the candidate pool gets small, which caps every
element's inclusion probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .oracle import (
    Objective,
    QueryLedger,
    Subset,
    batch_marginals,
    batch_pair_gains,
    evaluate_batch,
    sample_without_replacement,
)


class BreakReason(str, Enum):
    EXHAUSTED_ROUNDS = "exhausted_rounds"
    EMPTY_A = "empty_A"
    FULL_S = "full_S"
    SMALL_A = "small_A"


@dataclass(frozen=True)
class DerivedThresholdValues:
    """Internal constants derived from (n, k, eps, delta); natural logs."""

    eps_hat: float
    r: int
    m: int
    delta_hat: float
    ell: int
    ell_theoretical: int


@dataclass
class ThresholdParams:
    """Inputs for one threshold-sampling run.

    break_size, when set, is the early-exit pool bound; sample_override pins
    the per-estimate sample count for experiment parity (the theoretical count
    is still reported in the derived values).
    """

    k: int
    tau: float
    eps: float
    delta: float
    break_size: int | None = None
    sample_override: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0,1), got {self.eps}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0,1), got {self.delta}")
        if self.break_size is not None and self.break_size < 1:
            raise ValueError("break_size must be >= 1 when set")
        if self.sample_override is not None and self.sample_override < 1:
            raise ValueError("sample_override must be >= 1 when set")

    def derive(self, n: int) -> DerivedThresholdValues:
        eps_hat = self.eps / 3.0
        r = math.ceil(math.log(2.0 * n / self.delta) / math.log(1.0 / (1.0 - eps_hat)))
        m = math.ceil(math.log(self.k) / eps_hat)
        delta_hat = self.delta / (2.0 * r * (m + 1))
        ell_theoretical = 16 * math.ceil(math.log(2.0 / delta_hat) / eps_hat ** 2)
        ell = self.sample_override if self.sample_override is not None else ell_theoretical
        return DerivedThresholdValues(eps_hat=eps_hat, r=r, m=m,
                                      delta_hat=delta_hat, ell=ell,
                                      ell_theoretical=ell_theoretical)


@dataclass
class SamplingOutcome:
    """Result of a threshold-sampling run.

    f_s and f_empty are the values already paid for during the run, so
    downstream argmax steps need no fresh queries. snapshots holds one dict
    per outer round (candidate pool after the filter, solution after the
    update, chosen t, last estimate) for debugging and property tests.
    """

    s: Subset
    a: Subset
    break_reason: BreakReason
    ledger: QueryLedger
    f_s: float
    f_empty: float
    value_points: list[tuple[int, float]] = field(default_factory=list)
    snapshots: list[dict] = field(default_factory=list)


def draw_block_and_probe(rng: np.random.Generator, pool: np.ndarray, t: int,
                         count: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` independent (T, x) pairs: T uniform over (t-1)-subsets
    of pool, then x uniform over the rest.

    Implemented as the first t entries of a random order per sample, so x is
    exactly the t-th insertion. Returns (t_mat of shape (count, t-1), xs).
    """
    if not 1 <= t <= pool.size:
        raise ValueError(f"t must lie in [1, {pool.size}], got {t}")
    chunks_t, chunks_x = [], []
    # Bound per-chunk key memory; draw order stays deterministic.
    chunk = max(1, min(count, int(4_000_000 // max(1, pool.size))))
    done = 0
    while done < count:
        take = min(chunk, count - done)
        keys = rng.random((take, pool.size))
        part = np.argpartition(keys, t - 1, axis=1)[:, :t]
        chunks_t.append(pool[part[:, : t - 1]])
        chunks_x.append(pool[part[:, t - 1]])
        done += take
    return np.vstack(chunks_t), np.concatenate(chunks_x)


def sample_indicator(f: Objective, s: Subset, a: Subset, t: int, tau: float,
                     rng: np.random.Generator, ledger: QueryLedger) -> int:
    """One Bernoulli probe of whether the t-th random insertion clears tau.

    Costs two oracle evaluations. Estimation loops should use
    :func:`estimate_mean`, which issues all its samples in a single round.
    """
    pool = a.to_array()
    t_mat, xs = draw_block_and_probe(rng, pool, t, 1)
    gains = batch_pair_gains(f, s, t_mat, xs, ledger)
    return int(gains[0] >= tau)


def estimate_mean(f: Objective, s: Subset, a: Subset, t: int, tau: float,
                  ell: int, rng: np.random.Generator,
                  ledger: QueryLedger) -> float:
    """Mean of ell indicator samples, all issued in one adaptive round."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    pool = a.to_array()
    t_mat, xs = draw_block_and_probe(rng, pool, t, ell)
    gains = batch_pair_gains(f, s, t_mat, xs, ledger)
    return float(np.mean(gains >= tau))


def threshold_sampling(f: Objective, params: ThresholdParams,
                       rng: np.random.Generator,
                       ledger: QueryLedger | None = None) -> SamplingOutcome:
    """Run the sampler to completion and return (solution, surviving pool).

    Round structure: one initial round evaluates f(empty); each outer round is
    one filter round, the estimate rounds of the block-size scan, and one
    round to evaluate the updated solution (which is what makes the final
    value available downstream without fresh queries). Scan iterations whose
    block size repeats the previous one reuse its estimate, since they would
    probe the identical distribution.
    """
    n = f.n
    d = params.derive(n)
    if ledger is None:
        ledger = QueryLedger()

    s = Subset()
    f_empty = float(evaluate_batch(f, [s], ledger)[0])
    f_s = f_empty
    pool = np.arange(n, dtype=np.int64)
    value_points = [(ledger.rounds, f_s)]
    snapshots: list[dict] = []
    reason = BreakReason.EXHAUSTED_ROUNDS

    for outer in range(1, d.r + 1):
        gains = batch_marginals(f, s, pool, f_s, ledger)
        pool = pool[gains >= params.tau]
        snap = {
            "round": outer,
            "a_size": int(pool.size),
            "s_size": len(s),
            "a": tuple(int(x) for x in pool),
            "s": tuple(s.indices),
            "t": None,
            "mu": None,
            "estimates": [],
            "f_s": f_s,
        }
        if pool.size == 0:
            reason = BreakReason.EMPTY_A
            snapshots.append(snap)
            break
        if params.break_size is not None and pool.size < params.break_size:
            reason = BreakReason.SMALL_A
            snapshots.append(snap)
            break

        t = 1
        mu = None
        last_t = -1
        estimates: list[tuple[int, float]] = []
        for i in range(d.m + 1):
            t_i = min(int((1.0 + d.eps_hat) ** i), int(pool.size))
            if t_i == last_t:
                continue
            last_t = t_i
            t = t_i
            mu = estimate_mean(f, s, Subset(pool), t_i, params.tau, d.ell, rng, ledger)
            estimates.append((t_i, mu))
            if mu <= 1.0 - 1.5 * d.eps_hat:
                break

        block = sample_without_replacement(rng, pool, min(t, params.k - len(s)))
        s = s.union(block)
        f_s = float(evaluate_batch(f, [s], ledger)[0])
        value_points.append((ledger.rounds, f_s))
        snap.update(t=t, mu=mu, estimates=estimates,
                    s=tuple(s.indices), s_size=len(s), f_s=f_s)
        snapshots.append(snap)
        if len(s) == params.k:
            reason = BreakReason.FULL_S
            break

    return SamplingOutcome(s=s, a=Subset(pool), break_reason=reason,
                           ledger=ledger, f_s=f_s, f_empty=f_empty,
                           value_points=value_points, snapshots=snapshots)


def verify_termination_marginals(f: Objective, outcome: SamplingOutcome,
                                 tau: float) -> bool:
    """Check that every element's gain over the returned solution is below tau.

    Uses a scratch ledger, so the verification queries stay outside the run's
    own accounting.
    """
    scratch = QueryLedger()
    gains = batch_marginals(f, outcome.s, np.arange(f.n, dtype=np.int64),
                            outcome.f_s, scratch)
    return bool(np.all(gains < tau))
