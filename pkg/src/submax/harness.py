"""Benchmark harness: run algorithm x instance x k sweeps, emit CSV traces.

The per-round trace CSV has header
``algorithm,trial,round,cum_queries,best_value,k,seed`` and the summary CSV
``algorithm,k,mean_value,std_value,mean_queries,mean_rounds``. Reruns with the
same config are byte-identical apart from a leading timestamp comment, which
can be suppressed.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass, field

import numpy as np

from .baselines import greedy, random_lazy_greedy, random_prefix
from .nonmonotone import NonmonotoneParams, adaptive_nonmonotone_max
from .objectives import (
    Instance,
    generate_synthetic,
    load_edge_list,
    load_similarity_csv,
)
from .oracle import QueryLedger, Subset, evaluate_offline, make_rng

ALGORITHMS = ("anm", "greedy", "random", "rlg")
OBJECTIVES = ("image", "movie", "revenue", "synthetic-cut")

TRACE_HEADER = "algorithm,trial,round,cum_queries,best_value,k,seed"
SUMMARY_HEADER = "algorithm,k,mean_value,std_value,mean_queries,mean_rounds"


class ConfigError(ValueError):
    """The run configuration is invalid or inconsistent with the data."""


@dataclass
class RunConfig:
    """One experiment: an algorithm on an objective for one or more k."""

    objective: str
    algorithm: str
    ks: list[int]
    data: str | None = None
    synthetic: dict | None = None
    eps: float = 0.25
    delta: float = 0.1
    trials: int = 1
    seed: int = 0
    samples: int | None = 100
    rlg_eps: float = 0.01
    out: str | None = None
    trace: str | None = None
    debug_trace: str | None = None
    timestamp: bool = True

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.ks or any(k < 1 for k in self.ks):
            raise ConfigError("k values must be >= 1")
        if self.data is None and self.synthetic is None:
            raise ConfigError("provide a data path or a synthetic spec")


@dataclass
class TrialRecord:
    """Everything one trial produced, before flattening into CSV rows."""

    algorithm: str
    trial: int
    k: int
    seed: int
    output: Subset
    value: float
    ledger: QueryLedger
    points: list[tuple[int, float]]
    debug: list[dict] = field(default_factory=list)


def build_instance(config: RunConfig) -> Instance:
    if config.data is not None:
        if config.objective in ("image", "movie"):
            matrix = load_similarity_csv(config.data)
            lam = None
            if config.objective == "movie":
                lam = float(config.synthetic.get("lam", 0.95)) if config.synthetic else 0.95
            return Instance(kind=config.objective, data=matrix, lam=lam)
        graph = load_edge_list(config.data)
        return Instance(kind=config.objective, data=graph)
    spec = dict(config.synthetic or {})
    n = int(spec.pop("n", 50))
    seed = int(spec.pop("seed", config.seed))
    lam = float(spec.pop("lam", 0.95))
    param = spec.pop("p", spec.pop("dim", None))
    if spec:
        raise ConfigError(f"unknown synthetic keys {sorted(spec)}")
    return Instance(kind=config.objective, data=generate_synthetic(
        config.objective, n, param=None if param is None else float(param),
        seed=seed, lam=lam).data, lam=lam if config.objective == "movie" else None)


def _run_one(config: RunConfig, f, k: int, trial: int) -> TrialRecord:
    seed = config.seed + trial
    ledger = QueryLedger()
    points: list[tuple[int, float]] = []
    debug: list[dict] = []
    if config.algorithm == "greedy":
        out = greedy(f, k, ledger, progress=points)
    elif config.algorithm == "random":
        out = random_prefix(f, k, make_rng(seed), ledger, progress=points)
    elif config.algorithm == "rlg":
        out = random_lazy_greedy(f, k, config.rlg_eps, make_rng(seed), ledger,
                                 progress=points)
    else:
        params = NonmonotoneParams(k=k, eps=config.eps, delta=config.delta,
                                   sample_override=config.samples)
        out, ledger, trials = adaptive_nonmonotone_max(f, params, seed)
        points = _anm_points(trials, params)
        debug = [
            {"trial": t.index, "tau": t.tau,
             "break_reason": t.outcome.break_reason.value,
             "rounds": t.outcome.ledger.rounds,
             "queries": t.outcome.ledger.total_queries,
             "snapshots": [{key: snap[key] for key in
                            ("round", "a_size", "s_size", "t", "mu")}
                           for snap in t.outcome.snapshots]}
            for t in trials
        ]
    value = evaluate_offline(f, out)
    return TrialRecord(algorithm=config.algorithm, trial=trial, k=k, seed=seed,
                       output=out, value=value, ledger=ledger, points=points,
                       debug=debug)


def _anm_points(trials, params: NonmonotoneParams) -> list[tuple[int, float]]:
    """Per-round best over all logically parallel threshold trials.

    Trial-local round j lands on master round j+1 (the singleton sweep is
    round 1, where the best singleton is already a known feasible solution).
    """
    if not trials:
        return [(1, 0.0)]
    delta_star = trials[0].tau * params.k / params.c1
    points = [(1, delta_star)]
    for t in trials:
        for rnd, val in t.outcome.value_points:
            points.append((rnd + 1, val))
        if t.prefix_value is not None:
            points.append((t.prefix_round + 1, t.prefix_value))
    return points


def _trace_rows(record: TrialRecord) -> list[tuple]:
    by_round: dict[int, float] = {}
    for rnd, val in record.points:
        by_round[rnd] = max(val, by_round.get(rnd, -np.inf))
    cum = record.ledger.cumulative_queries()
    rows = []
    best = -np.inf
    for rnd in range(1, record.ledger.rounds + 1):
        if rnd in by_round:
            best = max(best, by_round[rnd])
        shown = best if best > -np.inf else 0.0
        rows.append((record.algorithm, record.trial, rnd, cum[rnd - 1],
                     shown, record.k, record.seed))
    return rows


def run_experiment(config: RunConfig, f=None) -> tuple[list[tuple], list[tuple]]:
    """Run the configured sweep; returns (trace_rows, summary_rows).

    Writes the trace CSV and summary CSV when paths are configured, plus an
    optional JSON-lines debug trace of the threshold trials.
    """
    instance = build_instance(config) if f is None else None
    objective = f if f is not None else instance.objective()
    for k in config.ks:
        if k > objective.n:
            raise ConfigError(f"k={k} exceeds ground set size n={objective.n}")

    trace_rows: list[tuple] = []
    summary_rows: list[tuple] = []
    debug_records: list[dict] = []
    for k in config.ks:
        records = [_run_one(config, objective, k, trial)
                   for trial in range(config.trials)]
        for rec in records:
            trace_rows.extend(_trace_rows(rec))
            if rec.debug:
                debug_records.append({"k": k, "trial": rec.trial, "seed": rec.seed,
                                      "trials": rec.debug})
        values = np.array([rec.value for rec in records])
        queries = np.array([rec.ledger.total_queries for rec in records])
        rounds = np.array([rec.ledger.rounds for rec in records])
        summary_rows.append((config.algorithm, k, float(values.mean()),
                             float(values.std()), float(queries.mean()),
                             float(rounds.mean())))
        samples = sum(rec.ledger.logical_samples for rec in records)
        print(f"{config.algorithm} k={k}: mean value {values.mean():.6g}, "
              f"mean queries {queries.mean():.6g} "
              f"({samples} logical samples across trials), "
              f"mean rounds {rounds.mean():.6g}")

    if config.trace:
        write_csv(config.trace, TRACE_HEADER, trace_rows, config.timestamp)
    if config.out:
        write_csv(config.out, SUMMARY_HEADER, summary_rows, config.timestamp)
    if config.debug_trace and debug_records:
        with open(config.debug_trace, "w", encoding="utf-8") as fh:
            for rec in debug_records:
                fh.write(json.dumps(rec) + "\n")
    return trace_rows, summary_rows


def _format_field(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, header: str, rows: list[tuple], timestamp: bool) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if timestamp:
            now = datetime.datetime.now(datetime.timezone.utc).isoformat()
            fh.write(f"# generated {now}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_format_field(x) for x in row) + "\n")


def read_trace_csv(path) -> list[tuple]:
    """Parse a trace CSV back into typed rows (comments skipped)."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line == TRACE_HEADER:
                continue
            alg, trial, rnd, cum, best, k, seed = line.split(",")
            rows.append((alg, int(trial), int(rnd), int(cum), float(best),
                         int(k), int(seed)))
    return rows
