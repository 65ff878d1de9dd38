"""Metrics-portfolio aggregation and mean-win-rate baselines.

A :class:`MetricsTable` holds per-sample evaluations of k models under N
metrics.  After polarity unification (larger always preferable), each metric
is rank-normalized through the CDF of the pool of all k*n values, and the
per-sample portfolio value is the weighted geometric mean

    R(x) = exp(sum_i lambda_i * log F_i(x_i)),

a number in (0, 1] because the pooled CDF of an observed value is at least
1/(k*n).  Portfolio values depend on the metric values only through ranks
within the pool, so any strictly increasing transform applied jointly to one
metric's raw values leaves them unchanged.

The mean win rate (MWR) baselines summarize the same table without
distributional machinery: at the model level, the fraction of other models
whose per-metric mean is <= this model's, averaged over metrics (identical
models all score 1 under the <= convention); at the sample level, the
fraction of (metric, sample) cells where this model strictly exceeds every
other model, ties at the max counting as losses.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .empirical import EmpiricalDistribution
from .errors import (
    DomainError,
    EmptyInput,
    NeedAtLeastTwo,
    NonFiniteValue,
    WeightMismatch,
)

POLARITIES = ("higher_better", "lower_better", "neg_log")

_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class MetricsTable:
    """k models x N metrics x n samples of raw metric evaluations.

    weights is a probability vector over metrics (validated to within
    1e-9 and stored renormalized); polarity marks, per metric, how raw
    values order preference before unification.
    """

    models: tuple[str, ...]
    metrics: tuple[str, ...]
    values: np.ndarray
    polarity: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 3:
            raise DomainError("values must be a (models, metrics, samples) array")
        if values.size == 0:
            raise EmptyInput("values array has no entries")
        if not np.all(np.isfinite(values)):
            raise NonFiniteValue("metric values must be finite")
        k, n_metrics, _ = values.shape
        if len(self.models) != k:
            raise DomainError("model names must match the first axis of values")
        if len(self.metrics) != n_metrics:
            raise DomainError("metric names must match the second axis of values")
        if len(self.polarity) != n_metrics:
            raise DomainError("need one polarity per metric")
        for p in self.polarity:
            if p not in POLARITIES:
                raise DomainError(f"unknown polarity {p!r}; expected one of {POLARITIES}")
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (n_metrics,):
            raise WeightMismatch("need one weight per metric")
        total = weights.sum()
        if np.any(weights < 0) or abs(total - 1.0) > _WEIGHT_TOL:
            raise DomainError("weights must be non-negative and sum to 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights / total)

    @classmethod
    def from_values(cls, values, models=None, metrics=None, polarity=None, weights=None):
        """Build a table with defaults: generated names, all higher_better,
        uniform weights."""
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 3:
            raise DomainError("values must be a (models, metrics, samples) array")
        k, n_metrics, _ = values.shape
        return cls(
            models=tuple(models) if models else tuple(f"model_{i}" for i in range(k)),
            metrics=tuple(metrics) if metrics else tuple(f"metric_{i}" for i in range(n_metrics)),
            values=values,
            polarity=tuple(polarity) if polarity else ("higher_better",) * n_metrics,
            weights=np.asarray(weights, dtype=np.float64)
            if weights is not None
            else np.full(n_metrics, 1.0 / n_metrics),
        )

    @property
    def n_models(self) -> int:
        return self.values.shape[0]

    @property
    def n_metrics(self) -> int:
        return self.values.shape[1]

    @property
    def n_samples(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class PortfolioDistribution:
    """Per-model distributions of portfolio values, plus the per-metric pools
    and weights needed to score held-out samples."""

    models: tuple[str, ...]
    dists: tuple[EmpiricalDistribution, ...]
    pools: tuple[EmpiricalDistribution, ...]
    weights: np.ndarray

    def score(self, sample) -> float:
        """Portfolio value of one held-out sample (one value per metric).

        Out-of-pool values clamp the CDF to [1/(pool size + 1), 1] so the
        score stays finite and positive.
        """
        sample = np.asarray(sample, dtype=np.float64)
        if sample.shape != (len(self.pools),):
            raise DomainError("need exactly one value per metric")
        log_r = 0.0
        for w, pool, x in zip(self.weights, self.pools, sample):
            f = min(max(pool.cdf_at(float(x)), 1.0 / (pool.n + 1)), 1.0)
            log_r += w * np.log(f)
        return float(np.exp(log_r))


def unify_polarity(t: MetricsTable) -> MetricsTable:
    """Re-express every metric so that larger values are preferable.

    higher_better columns pass through, lower_better are negated, and
    neg_log columns (values required in (0, 1], e.g. probabilities where
    smaller is better) map x to -log(x).
    """
    values = t.values.copy()
    for i, p in enumerate(t.polarity):
        if p == "lower_better":
            values[:, i, :] = -values[:, i, :]
        elif p == "neg_log":
            col = values[:, i, :]
            if np.any(col <= 0.0) or np.any(col > 1.0):
                raise DomainError(
                    f"neg_log polarity needs values in (0, 1]; metric {t.metrics[i]!r}"
                )
            values[:, i, :] = -np.log(col)
    return replace(t, values=values, polarity=("higher_better",) * t.n_metrics)


def build_portfolio(t: MetricsTable) -> PortfolioDistribution:
    """Pool each metric across models, rank-normalize through the pooled CDF,
    and combine into per-sample weighted geometric means.

    Requires a unified table (run :func:`unify_polarity` first).  Observed
    values always receive a pooled CDF of at least 1/(k*n), so every
    portfolio value lies in (0, 1].
    """
    if any(p != "higher_better" for p in t.polarity):
        raise DomainError("unify_polarity must run before build_portfolio")
    k, n_metrics, n = t.values.shape
    pools = tuple(
        EmpiricalDistribution.from_samples(t.values[:, i, :].ravel())
        for i in range(n_metrics)
    )
    log_r = np.zeros((k, n))
    for w, pool, col in zip(t.weights, pools, np.moveaxis(t.values, 1, 0)):
        log_r += w * np.log(pool.cdf_at(col))
    r = np.exp(log_r)
    return PortfolioDistribution(
        models=t.models,
        dists=tuple(EmpiricalDistribution.from_samples(r[a]) for a in range(k)),
        pools=pools,
        weights=t.weights,
    )


def mwr(t: MetricsTable, level: str = "model") -> np.ndarray:
    """Mean win rate per model, in [0, 1], aligned with t.models.

    level="model": for each metric, the fraction of the other k-1 models
    whose mean is <= this model's mean, averaged over metrics.  Ties win on
    both sides, so identical models all score 1.

    level="sample": the fraction of (metric, sample) cells where this model
    strictly exceeds the maximum of the other models; a tie at the max is a
    loss.
    """
    if t.n_models < 2:
        raise NeedAtLeastTwo("mean win rate compares at least two models")
    if level == "model":
        means = t.values.mean(axis=2)  # (k, N)
        geq = means[:, None, :] >= means[None, :, :]  # (a, b, metric)
        win_frac = (geq.sum(axis=1) - 1) / (t.n_models - 1)
        return win_frac.mean(axis=1)
    if level == "sample":
        top = np.sort(t.values, axis=0)[-2:]  # two largest per (metric, sample)
        others_max = np.where(t.values == top[1], top[0], top[1])
        return (t.values > others_max).mean(axis=(1, 2))
    raise DomainError("level must be 'model' or 'sample'")
