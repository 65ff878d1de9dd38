"""Rank models by stochastic dominance of their per-sample score distributions.

The package compares k models evaluated on n samples (optionally under N
metrics) through first- and second-order dominance violation ratios with
bootstrap significance, mean-risk summaries, a pooled-CDF metrics portfolio,
mean-win-rate baselines, and consensus rank aggregation.  The ``sdrank``
command line exposes the batch pipeline.
"""

from .dominance import (
    PairRatio,
    PairwiseRatios,
    d_iq_distance,
    fsd_violation_ratio,
    pairwise_ratios,
    relative_stats,
    ssd_violation_ratio,
    violation_ratio,
    w2_distance,
)
from .empirical import BootstrapSeed, EmpiricalDistribution, pooled_cdf_at
from .errors import (
    DomainError,
    DuplicateCell,
    EmptyInput,
    InputError,
    InvalidPermutation,
    NeedAtLeastTwo,
    NonFiniteValue,
    ParseError,
    RaggedTable,
    TooLarge,
    UnequalSampleSizes,
    UnknownRisk,
    WeightMismatch,
)
from .portfolio import (
    MetricsTable,
    PortfolioDistribution,
    build_portfolio,
    mwr,
    unify_polarity,
)
from .rankagg import (
    RankingSet,
    aggregate,
    aggregate_oracle,
    kendall_distance,
    objective,
    spearman_distance,
)
from .risk import (
    DEFAULT_P_GRID,
    MeanRiskSummary,
    gini_score_margin,
    gini_tail,
    mean_risk_score,
    summarize,
    tail_value_at_risk,
)
from .significance import (
    MultiTestResult,
    PairwiseTestResult,
    Ranking,
    TestConfig,
    WinMatrix,
    absolute_test,
    bootstrap_sigma,
    borda_rank,
    multi_test,
    relative_test,
    run_battery,
    validate_gaussian,
)

__version__ = "0.1.0"

__all__ = [
    "BootstrapSeed",
    "EmpiricalDistribution",
    "pooled_cdf_at",
    "PairRatio",
    "PairwiseRatios",
    "violation_ratio",
    "fsd_violation_ratio",
    "ssd_violation_ratio",
    "pairwise_ratios",
    "relative_stats",
    "w2_distance",
    "d_iq_distance",
    "MeanRiskSummary",
    "DEFAULT_P_GRID",
    "summarize",
    "tail_value_at_risk",
    "gini_tail",
    "gini_score_margin",
    "mean_risk_score",
    "TestConfig",
    "PairwiseTestResult",
    "WinMatrix",
    "Ranking",
    "MultiTestResult",
    "absolute_test",
    "relative_test",
    "multi_test",
    "run_battery",
    "bootstrap_sigma",
    "borda_rank",
    "validate_gaussian",
    "MetricsTable",
    "PortfolioDistribution",
    "unify_polarity",
    "build_portfolio",
    "mwr",
    "RankingSet",
    "aggregate",
    "aggregate_oracle",
    "objective",
    "spearman_distance",
    "kendall_distance",
    "InputError",
    "EmptyInput",
    "NonFiniteValue",
    "DomainError",
    "NeedAtLeastTwo",
    "UnequalSampleSizes",
    "UnknownRisk",
    "WeightMismatch",
    "ParseError",
    "RaggedTable",
    "DuplicateCell",
    "InvalidPermutation",
    "TooLarge",
]
