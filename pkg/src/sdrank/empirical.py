"""Empirical distributions with exact quantile and integrated-quantile evaluation.

A distribution here is just a sorted sample.  Three functions of it drive
everything else in the package:

* ``quantile_at(p)`` -- the left-continuous generalized inverse
  ``F^(-1)(p) = inf{x : F(x) >= p}``, which for a sorted sample of size ``n``
  is ``values[ceil(p * n) - 1]``.  No interpolation: the quantile function is
  the exact step function of the sample.
* ``integrated_quantile_at(p)`` -- ``F^(-2)(p) = integral_0^p F^(-1)(t) dt``,
  a convex piecewise-linear function with breakpoints at ``i / n`` and
  ``F^(-2)(1)`` equal to the sample mean.  Evaluated in closed form.
* ``cdf_at(x)`` -- right-continuous empirical CDF, ``#{v <= x} / n``.

Bootstrap resampling is keyed by :class:`BootstrapSeed`: the ``(seed,
iteration)`` pair alone determines the uniform draws, so any iteration can be
regenerated in isolation and iterations may run in parallel without sharing
generator state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EmptyInput, NonFiniteValue

# Slack applied to p * n before taking the ceiling, so that a probability
# computed in floating point as i / n lands on the left piece of the step
# rather than one index past it.  Safe while p * n carries absolute rounding
# error below 1e-9, i.e. for any realistic n.
_INDEX_EPS = 1e-9


@dataclass(frozen=True)
class BootstrapSeed:
    """Key identifying one deterministic resampling stream.

    Parameters
    ----------
    seed : int
        Base seed shared by a whole bootstrap run.
    iteration : int
        Index of the resampling round.  Distinct iterations give
        statistically independent streams; the same pair always reproduces
        the same draws.
    """

    seed: int
    iteration: int

    def __post_init__(self):
        if self.seed < 0 or self.iteration < 0:
            raise DomainError("seed and iteration must be non-negative")

    def generator(self) -> np.random.Generator:
        """A fresh generator for this (seed, iteration) pair."""
        return np.random.default_rng((self.seed, self.iteration))


def _uniform_indices(rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    """Sample indices for ``size`` draws by inverse transform.

    Uniforms are taken on (0, 1] (``1 - U[0,1)``) and mapped through the
    quantile step, u -> ceil(u * n) - 1, so each of the n points is hit with
    probability exactly 1/n.
    """
    u = 1.0 - rng.random(size)
    idx = np.ceil(u * n - _INDEX_EPS).astype(np.int64) - 1
    return np.clip(idx, 0, n - 1)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """A sorted finite sample with exact quantile machinery.

    Construct via :meth:`from_samples`; the raw constructor trusts its inputs
    (values sorted, prefix consistent) and exists for internal fast paths.
    """

    values: np.ndarray
    _prefix: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalDistribution":
        arr = np.asarray(samples, dtype=np.float64).ravel()
        if arr.size == 0:
            raise EmptyInput("empirical distribution needs at least one value")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue("sample contains NaN or infinite values")
        v = np.sort(arr)
        prefix = np.concatenate(([0.0], np.cumsum(v)))
        return cls(values=v, _prefix=prefix)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def mean(self) -> float:
        return float(self._prefix[-1] / self.n)

    def quantile_at(self, p):
        """Left-continuous sample quantile ``F^(-1)(p)`` for p in (0, 1].

        Accepts a scalar or an array; returns matching shape.
        """
        p_arr = np.asarray(p, dtype=np.float64)
        if np.any(p_arr <= 0.0) or np.any(p_arr > 1.0):
            raise DomainError("quantile level must lie in (0, 1]")
        idx = np.ceil(p_arr * self.n - _INDEX_EPS).astype(np.int64) - 1
        idx = np.clip(idx, 0, self.n - 1)
        out = self.values[idx]
        return float(out) if p_arr.ndim == 0 else out

    def integrated_quantile_at(self, p):
        """``F^(-2)(p) = integral_0^p F^(-1)(t) dt`` for p in [0, 1], exactly.

        With j = floor(p * n), the integral is the sum of the first j full
        steps plus the partial step in progress:
        ``prefix[j] / n + (p - j / n) * values[j]``.  The function is
        continuous, so a float-rounding slip of j across a breakpoint cannot
        change the value; ``integrated_quantile_at(1.0)`` is the mean.
        """
        p_arr = np.asarray(p, dtype=np.float64)
        if np.any(p_arr < 0.0) or np.any(p_arr > 1.0):
            raise DomainError("integration endpoint must lie in [0, 1]")
        j = np.clip(np.floor(p_arr * self.n).astype(np.int64), 0, self.n - 1)
        out = self._prefix[j] / self.n + (p_arr - j / self.n) * self.values[j]
        return float(out) if p_arr.ndim == 0 else out

    def cdf_at(self, x):
        """Right-continuous empirical CDF ``#{v <= x} / n``."""
        x_arr = np.asarray(x, dtype=np.float64)
        out = np.searchsorted(self.values, x_arr, side="right") / self.n
        return float(out) if x_arr.ndim == 0 else out

    def resample(self, m: int, bs: BootstrapSeed) -> "EmpiricalDistribution":
        """Sorted bootstrap resample of size m drawn from this sample.

        Inverse-transform sampling: m uniforms on (0, 1] from the stream keyed
        by ``bs``, each mapped through ``quantile_at``.  Deterministic in
        ``bs`` alone.
        """
        if m <= 0:
            raise DomainError("resample size must be positive")
        idx = _uniform_indices(bs.generator(), m, self.n)
        v = np.sort(self.values[idx])
        prefix = np.concatenate(([0.0], np.cumsum(v)))
        return EmpiricalDistribution(values=v, _prefix=prefix)


def pooled_cdf_at(pool: EmpiricalDistribution, x):
    """CDF of a pooled sample at x: ``#{v <= x} / n``, right-continuous.

    Strictly positive for any x at or above the pool minimum, which is what
    keeps log-CDF portfolio values finite on observed data.
    """
    return pool.cdf_at(x)
