"""Evaluation-oracle core: subsets, objectives, query metering, batched rounds.

Adaptivity is a measured quantity here, not a convention. Every oracle access
made by an algorithm flows through the batched entry points in this module
(``evaluate_batch``, ``batch_marginals``, ``batch_pair_gains``), and each call
is exactly one adaptive round on the attached :class:`QueryLedger`. Algorithm
modules never touch ``Objective._evaluate`` directly.

Randomness is always drawn by single-threaded orchestration code before a
batch is issued, so results are reproducible regardless of how a batch is
evaluated internally.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class InvalidSubsetError(ValueError):
    """A subset refers to element indices outside the oracle's ground set."""


class Subset:
    """Immutable set of ground-set element indices.

    Stored as a sorted index tuple with a companion frozenset, so iteration
    order is deterministic and membership tests are O(1).
    """

    __slots__ = ("indices", "_members", "_array")

    def __init__(self, indices: Iterable[int] = ()):
        members = frozenset(int(i) for i in indices)
        for i in members:
            if i < 0:
                raise InvalidSubsetError(f"negative element index {i}")
        self.indices: tuple[int, ...] = tuple(sorted(members))
        self._members = members
        self._array: np.ndarray | None = None

    def to_array(self) -> np.ndarray:
        if self._array is None:
            self._array = np.asarray(self.indices, dtype=np.int64)
        return self._array

    def union(self, other: "Subset | Iterable[int]") -> "Subset":
        if isinstance(other, Subset):
            return Subset(self._members | other._members)
        return Subset(self._members.union(int(i) for i in other))

    def add(self, element: int) -> "Subset":
        return Subset(self._members | {int(element)})

    def __contains__(self, element: int) -> bool:
        return element in self._members

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subset):
            return NotImplemented
        return self._members == other._members

    def __hash__(self) -> int:
        return hash(self._members)

    def __repr__(self) -> str:
        return f"Subset({list(self.indices)})"


class Objective(ABC):
    """Evaluation oracle for a nonnegative set function over n elements.

    Subclasses implement :meth:`_evaluate` on a sorted int64 index array.
    Evaluation must be deterministic, pure, and safe for concurrent read-only
    calls; nonnegativity is validated by the submodularity checker rather than
    assumed. The underscore methods are the raw oracle: algorithm code goes
    through the module-level batch functions so every query is metered.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"ground set size must be >= 1, got {n}")
        self.n = int(n)

    @abstractmethod
    def _evaluate(self, idx: np.ndarray) -> float:
        """Value of the subset given as a sorted index array."""

    def _gain_batch(self, base_idx: np.ndarray, t_mat: np.ndarray,
                    xs: np.ndarray) -> np.ndarray | None:
        """Optional vectorized path for paired gain queries.

        Row j asks for f(B_j + x_j) - f(B_j) with B_j = base + t_mat[j].
        Preconditions: t_mat rows are duplicate-free and disjoint from base;
        a gain must be exactly 0.0 when x_j already lies in B_j. Return None
        (the default) to fall back to two evaluations per row.
        """
        return None

    def _evaluate_batch(self, masks: np.ndarray) -> np.ndarray | None:
        """Optional vectorized path for whole-subset batches.

        masks is a (batch, n) boolean membership matrix. Return None (the
        default) to fall back to one :meth:`_evaluate` call per row.
        """
        return None


@dataclass
class QueryLedger:
    """Metering record: one entry per adaptive round, queries within it.

    ``total_queries`` and ``rounds`` are derived from ``per_round`` so the
    conservation invariant (total = sum over rounds) holds by construction.
    ``logical_samples`` counts indicator samples one-per-sample, while the
    query counters meter the two raw evaluations each sample costs.
    """

    per_round: list[tuple[int, int]] = field(default_factory=list)
    logical_samples: int = 0

    @property
    def total_queries(self) -> int:
        return sum(q for _, q in self.per_round)

    @property
    def rounds(self) -> int:
        return len(self.per_round)

    def add_round(self, queries: int, logical_samples: int = 0) -> None:
        if queries < 1:
            raise ValueError("a round must contain at least one query")
        self.per_round.append((len(self.per_round) + 1, int(queries)))
        self.logical_samples += int(logical_samples)

    def cumulative_queries(self) -> list[int]:
        totals, acc = [], 0
        for _, q in self.per_round:
            acc += q
            totals.append(acc)
        return totals

    @classmethod
    def merge_parallel(cls, ledgers: Sequence["QueryLedger"]) -> "QueryLedger":
        """Combine ledgers of logically parallel runs.

        Round j of the merged ledger holds the union of every run's round-j
        queries, so rounds = max over runs and queries = sum over runs.
        """
        merged = cls()
        depth = max((led.rounds for led in ledgers), default=0)
        for j in range(depth):
            q = sum(led.per_round[j][1] for led in ledgers if led.rounds > j)
            merged.per_round.append((j + 1, q))
        merged.logical_samples = sum(led.logical_samples for led in ledgers)
        return merged


def _as_index_array(candidates) -> np.ndarray:
    if isinstance(candidates, Subset):
        return candidates.to_array()
    return np.asarray(list(candidates), dtype=np.int64)


def _check_bounds(f: Objective, idx: np.ndarray) -> None:
    if idx.size == 0:
        return
    lo, hi = int(idx.min()), int(idx.max())
    if lo < 0 or hi >= f.n:
        raise InvalidSubsetError(
            f"element index out of range [0, {f.n}): saw {lo if lo < 0 else hi}")


def evaluate_batch(f: Objective, queries: Sequence,
                   ledger: QueryLedger) -> np.ndarray:
    """Evaluate a batch of subsets in one adaptive round.

    Queries may be Subsets or duplicate-free index arrays. Returns values in
    query order; the ledger gains exactly one round and len(queries) queries.
    Queries within the batch are mutually independent, so implementations may
    evaluate them concurrently (here: a vectorized objective path when one
    exists).
    """
    if len(queries) == 0:
        raise ValueError("evaluate_batch requires a nonempty batch")
    arrays = []
    presorted = []
    for q in queries:
        if isinstance(q, Subset):
            arrays.append(q.to_array())
            presorted.append(True)
        else:
            arr = q if isinstance(q, np.ndarray) else np.asarray(list(q))
            arrays.append(arr.astype(np.int64, copy=False))
            presorted.append(False)
    sizes = np.array([a.size for a in arrays])
    total = int(sizes.sum())
    flat = np.concatenate(arrays) if total else np.empty(0, dtype=np.int64)
    _check_bounds(f, flat)
    ledger.add_round(len(arrays))

    if type(f)._evaluate_batch is not Objective._evaluate_batch:
        masks = np.zeros((len(arrays), f.n), dtype=bool)
        masks[np.repeat(np.arange(len(arrays)), sizes), flat] = True
        if int(np.count_nonzero(masks)) != total:
            raise InvalidSubsetError("duplicate element in subset query")
        fast = f._evaluate_batch(masks)
        if fast is not None:
            return np.asarray(fast, dtype=np.float64)

    out = np.empty(len(arrays), dtype=np.float64)
    for j, arr in enumerate(arrays):
        if not presorted[j]:
            arr = np.sort(arr)
            if arr.size > 1 and (np.diff(arr) == 0).any():
                raise InvalidSubsetError("duplicate element in subset query")
        out[j] = f._evaluate(arr)
    return out


def batch_marginals(f: Objective, base: Subset, candidates,
                    base_value: float, ledger: QueryLedger) -> np.ndarray:
    """Gains f(base + x) - base_value for each candidate x, one adaptive round.

    base_value must already be known, so the round costs exactly
    len(candidates) queries. A candidate already in base has gain 0.
    """
    cand = _as_index_array(candidates)
    if cand.size == 0:
        raise ValueError("batch_marginals requires at least one candidate")
    _check_bounds(f, cand)
    base_idx = base.to_array()
    _check_bounds(f, base_idx)
    ledger.add_round(int(cand.size))

    empty_t = np.empty((cand.size, 0), dtype=np.int64)
    fast = f._gain_batch(base_idx, empty_t, cand)
    if fast is not None:
        return np.asarray(fast, dtype=np.float64)
    out = np.empty(cand.size, dtype=np.float64)
    for j, x in enumerate(cand):
        if x in base:
            out[j] = 0.0
        else:
            out[j] = f._evaluate(base.add(int(x)).to_array()) - base_value
    return out


def batch_pair_gains(f: Objective, base: Subset, t_mat: np.ndarray,
                     xs: np.ndarray, ledger: QueryLedger) -> np.ndarray:
    """Gains f(base + T_j + x_j) - f(base + T_j) for each row j, one round.

    Each row simulates one indicator sample and is metered as two raw
    evaluations (2 * len(xs) queries) plus one logical sample per row.
    Rows of t_mat must be duplicate-free and disjoint from base.
    """
    t_mat = np.asarray(t_mat, dtype=np.int64)
    xs = np.asarray(xs, dtype=np.int64)
    if xs.ndim != 1 or t_mat.ndim != 2 or t_mat.shape[0] != xs.size:
        raise ValueError("t_mat must be (m, t-1) and xs length m")
    if xs.size == 0:
        raise ValueError("batch_pair_gains requires at least one pair")
    _check_bounds(f, xs)
    if t_mat.size:
        _check_bounds(f, t_mat.ravel())
    base_idx = base.to_array()
    _check_bounds(f, base_idx)
    ledger.add_round(2 * xs.size, logical_samples=xs.size)

    fast = f._gain_batch(base_idx, t_mat, xs)
    if fast is not None:
        return np.asarray(fast, dtype=np.float64)

    # Fallback: two evaluations per pair, memoized within the batch.
    memo: dict[frozenset, float] = {}

    def value(members: frozenset) -> float:
        got = memo.get(members)
        if got is None:
            got = f._evaluate(np.asarray(sorted(members), dtype=np.int64))
            memo[members] = got
        return got

    base_members = frozenset(int(i) for i in base_idx)
    out = np.empty(xs.size, dtype=np.float64)
    for j in range(xs.size):
        b = base_members.union(int(e) for e in t_mat[j])
        out[j] = value(b | {int(xs[j])}) - value(b)
    return out


def evaluate_offline(f: Objective, subset) -> float:
    """Evaluate one subset without touching any ledger.

    For tests, validators, and brute-force oracles only; algorithm modules
    must use the metered batch functions.
    """
    arr = subset.to_array() if isinstance(subset, Subset) else _as_index_array(subset)
    arr = np.sort(arr)
    _check_bounds(f, arr)
    return float(f._evaluate(arr))


def make_rng(seed) -> np.random.Generator:
    """Deterministic generator; identical seed gives an identical draw stream."""
    return np.random.default_rng(seed)


def spawn_seeds(seed: int | np.random.SeedSequence,
                count: int) -> list[np.random.SeedSequence]:
    """Independent child seed sequences derived by mixing the child index."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss.spawn(count)


def sample_without_replacement(rng: np.random.Generator, pool,
                               size: int) -> np.ndarray:
    """Uniform random size-subset of pool via a partial Fisher-Yates shuffle."""
    arr = np.array(pool, dtype=np.int64, copy=True)
    size = min(int(size), arr.size)
    for i in range(size):
        j = i + int(rng.integers(arr.size - i))
        arr[i], arr[j] = arr[j], arr[i]
    return arr[:size]
