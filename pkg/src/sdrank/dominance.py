"""Violation ratios quantifying almost-first- and almost-second-order dominance.

For two samples X and Y, the order-1 (FSD) violation ratio of X over Y is

    eps1(X, Y) = integral (F_Y^(-1)(t) - F_X^(-1)(t))_+^2 dt / W2(X, Y)^2,

the share of the squared 2-Wasserstein distance carried by the region where
Y's quantile exceeds X's.  The order-2 (SSD) ratio replaces the quantile
functions with their running integrals F^(-2) and the denominator with the
squared L2 distance between those integrals (``diq``).  Both ratios live in
[0, 1]; eps = 0 means clean dominance of X over Y, and eps(X, Y) +
eps(Y, X) = 1 whenever the pair is not identical.

Integrals are computed exactly, never by sampling a grid:

* both empirical quantile functions are constant on every interval between
  adjacent points of the merged breakpoint set {i/n} U {j/m}, so order-1
  segment integrals are just widths times squared differences;
* the integrated quantiles are linear on those same segments, so each order-2
  segment contributes a closed-form quadratic integral, split at the interior
  zero crossing of the linear difference when the endpoint signs differ.

Pairs whose denominator is numerically zero (near-identical samples) report
the conventional value 0.5 together with a ``degenerate`` flag rather than
raising: with no distance to normalize by, neither side dominates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .empirical import EmpiricalDistribution
from .errors import DomainError, NeedAtLeastTwo

# A pair counts as identical when its squared distance falls below this many
# units of squared data scale; see _ratio_with_flag.
_DEGENERATE_REL_TOL = 1e-15


@dataclass(frozen=True)
class Segments:
    """Shared integration grid for one (n, m) sample-size pair.

    ``widths[s]`` is the length of merged segment s; ``ix[s]`` / ``iy[s]``
    index the sorted-sample value each quantile function takes there.  ``ix``
    of ``None`` marks the equal-size fast path where both index maps are the
    identity.  The grid depends only on (n, m), so one instance serves every
    bootstrap replicate of a pair.
    """

    widths: np.ndarray
    ix: np.ndarray | None
    iy: np.ndarray | None


def merged_segments(n: int, m: int) -> Segments:
    """Segment decomposition of (0, 1] by the union of {i/n} and {j/m}."""
    if n == m:
        return Segments(widths=np.full(n, 1.0 / n), ix=None, iy=None)
    bx = np.arange(1, n + 1) / n
    by = np.arange(1, m + 1) / m
    grid = np.union1d(bx, by)
    widths = np.diff(np.concatenate(([0.0], grid)))
    # Count of breakpoints strictly below each segment's right endpoint ==
    # index of the order statistic the (left-continuous) quantile takes there.
    ix = np.searchsorted(bx, grid, side="left")
    iy = np.searchsorted(by, grid, side="left")
    return Segments(widths=widths, ix=ix, iy=iy)


def pair_parts(
    X: np.ndarray,
    Y: np.ndarray,
    seg: Segments,
    order: int,
):
    """Exact (numerator, denominator) of the violation ratio, batched.

    X and Y are row-sorted matrices of shape (R, n) and (R, m); row r of each
    is compared against row r of the other.  Returns two length-R arrays.
    """
    QX = X if seg.ix is None else X[:, seg.ix]
    QY = Y if seg.iy is None else Y[:, seg.iy]
    w = seg.widths
    d = QY - QX
    if order == 1:
        num = (np.maximum(d, 0.0) ** 2) @ w
        den = (d * d) @ w
        return num, den
    if order != 2:
        raise DomainError("order must be 1 or 2")

    # Integrated-quantile difference at segment endpoints; D(0) = 0 and the
    # difference is linear inside each segment.
    R, S = d.shape
    D = np.empty((R, S + 1))
    D[:, 0] = 0.0
    np.cumsum(d * w, axis=1, out=D[:, 1:])
    d0 = D[:, :-1]
    d1 = D[:, 1:]

    full = d0 * d0 + d0 * d1 + d1 * d1  # 3/h * integral of D^2 over segment
    with np.errstate(divide="ignore", invalid="ignore"):
        t = d0 / (d0 - d1)  # crossing position as a fraction of the segment
    pos = np.where((d0 >= 0.0) & (d1 >= 0.0), full, 0.0)
    pos = np.where((d0 > 0.0) & (d1 < 0.0), t * d0 * d0, pos)
    pos = np.where((d0 < 0.0) & (d1 > 0.0), (1.0 - t) * d1 * d1, pos)
    num = (pos @ w) / 3.0
    den = (full @ w) / 3.0
    return num, den


def _ratio_with_flag(num, den, scale: float):
    """Ratio with the identical-pair convention applied elementwise.

    A denominator below ``1e-15 * scale**2`` (scale = largest absolute data
    value) means the two samples are numerically the same distribution; such
    entries report eps = 0.5 and are flagged instead of dividing by ~0.
    """
    tol = _DEGENERATE_REL_TOL * scale * scale
    degenerate = den <= tol
    with np.errstate(divide="ignore", invalid="ignore"):
        eps = np.where(degenerate, 0.5, num / np.where(degenerate, 1.0, den))
    return eps, degenerate


@dataclass(frozen=True)
class PairRatio:
    """One violation ratio with its ingredients."""

    eps: float
    numerator: float
    denominator: float
    degenerate: bool


def violation_ratio(
    x: EmpiricalDistribution, y: EmpiricalDistribution, order: int
) -> PairRatio:
    """Violation ratio of x over y at the given dominance order (1 or 2)."""
    seg = merged_segments(x.n, y.n)
    num, den = pair_parts(x.values[None, :], y.values[None, :], seg, order)
    scale = max(
        float(np.max(np.abs(x.values))), float(np.max(np.abs(y.values)))
    )
    eps, degen = _ratio_with_flag(num, den, scale)
    return PairRatio(
        eps=float(eps[0]),
        numerator=float(num[0]),
        denominator=float(den[0]),
        degenerate=bool(degen[0]),
    )


def fsd_violation_ratio(x: EmpiricalDistribution, y: EmpiricalDistribution) -> float:
    """Order-1 violation ratio of x over y (0 = clean first-order dominance)."""
    return violation_ratio(x, y, 1).eps


def ssd_violation_ratio(x: EmpiricalDistribution, y: EmpiricalDistribution) -> float:
    """Order-2 violation ratio of x over y (0 = clean second-order dominance)."""
    return violation_ratio(x, y, 2).eps


def w2_distance(x: EmpiricalDistribution, y: EmpiricalDistribution) -> float:
    """Exact 2-Wasserstein distance between two empirical distributions."""
    return float(np.sqrt(violation_ratio(x, y, 1).denominator))


def d_iq_distance(x: EmpiricalDistribution, y: EmpiricalDistribution) -> float:
    """L2 distance between integrated quantile functions (a metric)."""
    return float(np.sqrt(violation_ratio(x, y, 2).denominator))


@dataclass(frozen=True)
class PairwiseRatios:
    """All pairwise violation ratios for k distributions.

    ``eps1[i, j]`` / ``eps2[i, j]`` are the order-1/2 ratios of model i over
    model j, with zero diagonals.  ``w2sq`` and ``diqsq`` hold the squared
    distances that normalize them, and ``degenerate1`` / ``degenerate2`` mark
    pairs that fell under the identical-pair convention at each order.
    """

    eps1: np.ndarray
    eps2: np.ndarray
    w2sq: np.ndarray
    diqsq: np.ndarray
    degenerate1: np.ndarray
    degenerate2: np.ndarray


def pairwise_ratios(dists: list[EmpiricalDistribution]) -> PairwiseRatios:
    """Violation ratios and distances for every ordered pair of models."""
    k = len(dists)
    if k < 2:
        raise NeedAtLeastTwo("pairwise ratios need at least two distributions")
    eps1 = np.zeros((k, k))
    eps2 = np.zeros((k, k))
    w2sq = np.zeros((k, k))
    diqsq = np.zeros((k, k))
    deg1 = np.zeros((k, k), dtype=bool)
    deg2 = np.zeros((k, k), dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            r1 = violation_ratio(dists[i], dists[j], 1)
            r2 = violation_ratio(dists[i], dists[j], 2)
            eps1[i, j] = r1.eps
            eps2[i, j] = r2.eps
            # eps(Y, X) = 1 - eps(X, Y); the 0.5 convention is its own complement.
            eps1[j, i] = 1.0 - r1.eps
            eps2[j, i] = 1.0 - r2.eps
            w2sq[i, j] = w2sq[j, i] = r1.denominator
            diqsq[i, j] = diqsq[j, i] = r2.denominator
            deg1[i, j] = deg1[j, i] = r1.degenerate
            deg2[i, j] = deg2[j, i] = r2.degenerate
    return PairwiseRatios(
        eps1=eps1, eps2=eps2, w2sq=w2sq, diqsq=diqsq,
        degenerate1=deg1, degenerate2=deg2,
    )


def relative_stats(dists: list[EmpiricalDistribution], order: int):
    """One-vs-all violation ratios and their pairwise differences.

    Returns ``(eps_one, delta)`` where ``eps_one[i]`` averages model i's
    ratio against every other model and ``delta[i, j] = eps_one[i] -
    eps_one[j]``.  Lower ``eps_one`` is better; ``delta`` is antisymmetric.
    For k = 2 this reduces to ``delta[0, 1] = 2 * eps12 - 1``.
    """
    ratios = pairwise_ratios(dists)
    eps = ratios.eps1 if order == 1 else ratios.eps2
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    k = eps.shape[0]
    eps_one = eps.sum(axis=1) / (k - 1)
    delta = eps_one[:, None] - eps_one[None, :]
    return eps_one, delta
