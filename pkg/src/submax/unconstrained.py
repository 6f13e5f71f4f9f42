"""Unconstrained maximization by the best of several uniform random subsets.

Draws a batch of independent subsets (each element kept with probability 1/2,
i.e. uniform over the power set of the pool), evaluates them all in a single
adaptive round, and returns the best one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .oracle import Objective, QueryLedger, Subset, evaluate_batch


@dataclass
class UnconstrainedParams:
    """Error/failure targets; t is the derived number of random draws."""

    eps: float
    delta: float

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0,1), got {self.eps}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0,1), got {self.delta}")
        if self.eps > 0.25:
            # The query-complexity inequality log(1+(4/3)eps) >= 2eps/3 needs
            # eps <= 1/4; larger values still run but lose that bound.
            warnings.warn(f"eps={self.eps} > 0.25 weakens the query bound",
                          stacklevel=2)

    @property
    def t(self) -> int:
        return math.ceil(math.log(1.0 / self.delta)
                         / math.log(1.0 + (4.0 / 3.0) * self.eps))


def unconstrained_max(f: Objective, a: Subset, params: UnconstrainedParams,
                      rng: np.random.Generator, ledger: QueryLedger,
                      include_empty: bool = False,
                      empty_value: float | None = None) -> Subset:
    """Best of t uniform random subsets of the pool a, in one adaptive round.

    Ties go to the first subset drawn. include_empty adds the empty set as an
    implicit zero-cost candidate when its value is already known; it is off by
    default so the round/query accounting matches the bare algorithm.
    """
    if len(a) == 0:
        raise ValueError("the candidate pool must be nonempty")
    pool = a.to_array()
    t = params.t
    masks = rng.random((t, pool.size)) < 0.5
    draws = [pool[mask] for mask in masks]
    values = evaluate_batch(f, draws, ledger)
    best = int(np.argmax(values))
    if include_empty and empty_value is not None and empty_value > values[best]:
        return Subset()
    return Subset(draws[best])
