"""Low-adaptivity submodular maximization with metered oracle access."""

from .baselines import greedy, random_lazy_greedy, random_prefix
from .harness import RunConfig, run_experiment
from .nonmonotone import (
    NonmonotoneParams,
    ThresholdTrial,
    adaptive_nonmonotone_max,
    best_prefix,
    downsample,
    max_singleton,
    threshold_grid,
)
from .objectives import (
    CutObjective,
    GroundSetTooLargeError,
    ImageSummarizationObjective,
    Instance,
    ModularObjective,
    MovieRecommendationObjective,
    RevenueObjective,
    SaturatedCoverageObjective,
    SimilarityMatrix,
    WeightedGraph,
    brute_force_opt,
    check_submodularity,
    generate_synthetic,
    load_edge_list,
    load_similarity_csv,
    make_random_coverage,
    save_edge_list,
    save_similarity_csv,
)
from .oracle import (
    InvalidSubsetError,
    Objective,
    QueryLedger,
    Subset,
    batch_marginals,
    batch_pair_gains,
    evaluate_batch,
    evaluate_offline,
    make_rng,
    sample_without_replacement,
    spawn_seeds,
)
from .threshold import (
    BreakReason,
    SamplingOutcome,
    ThresholdParams,
    estimate_mean,
    sample_indicator,
    threshold_sampling,
    verify_termination_marginals,
)
from .unconstrained import UnconstrainedParams, unconstrained_max

__version__ = "0.1.0"

__all__ = [
    "BreakReason",
    "CutObjective",
    "GroundSetTooLargeError",
    "ImageSummarizationObjective",
    "Instance",
    "InvalidSubsetError",
    "ModularObjective",
    "MovieRecommendationObjective",
    "NonmonotoneParams",
    "Objective",
    "QueryLedger",
    "RevenueObjective",
    "RunConfig",
    "SamplingOutcome",
    "SaturatedCoverageObjective",
    "SimilarityMatrix",
    "Subset",
    "ThresholdParams",
    "ThresholdTrial",
    "UnconstrainedParams",
    "WeightedGraph",
    "adaptive_nonmonotone_max",
    "batch_marginals",
    "batch_pair_gains",
    "best_prefix",
    "brute_force_opt",
    "check_submodularity",
    "downsample",
    "estimate_mean",
    "evaluate_batch",
    "evaluate_offline",
    "generate_synthetic",
    "greedy",
    "load_edge_list",
    "load_similarity_csv",
    "make_random_coverage",
    "make_rng",
    "max_singleton",
    "random_lazy_greedy",
    "random_prefix",
    "run_experiment",
    "sample_indicator",
    "sample_without_replacement",
    "save_edge_list",
    "save_similarity_csv",
    "spawn_seeds",
    "threshold_grid",
    "threshold_sampling",
    "unconstrained_max",
    "verify_termination_marginals",
]
