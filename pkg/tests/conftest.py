"""Shared test helpers: oracle integrators and random-instance generators.

The Riemann oracle below recomputes violation-ratio integrals from scratch
(midpoint rule on a grid aligned to every quantile breakpoint of both
samples) so the closed-form integration in the library is checked against an
independent construction, not against itself.
"""

import hypothesis
import numpy as np

import sdrank

hypothesis.settings.register_profile(
    "suite", deadline=None, max_examples=50, derandomize=True
)
hypothesis.settings.load_profile("suite")

# The library's TestConfig dataclass starts with "Test"; tell pytest it is
# not a test class.
sdrank.TestConfig.__test__ = False


def riemann_ratios(xv, yv, order, points=1_000_000):
    """(numerator, denominator) of the order-1/2 violation ratio of x over y
    by midpoint Riemann sum.

    The grid size is the smallest multiple of n*m above ``points``, so every
    breakpoint i/n and j/m lies on a cell edge: the order-1 integrand is then
    constant per cell (midpoint sum exact) and the integrated quantiles are
    evaluated exactly at midpoints from cell-wise prefix sums.
    """
    x = np.sort(np.asarray(xv, dtype=np.float64))
    y = np.sort(np.asarray(yv, dtype=np.float64))
    n, m = len(x), len(y)
    base = n * m
    reps = max(1, -(-points // base))
    big = base * reps
    p = (np.arange(big) + 0.5) / big
    qx = x[np.minimum((p * n).astype(np.int64), n - 1)]
    qy = y[np.minimum((p * m).astype(np.int64), m - 1)]
    if order == 1:
        d = qy - qx
    else:
        ix = (np.concatenate(([0.0], np.cumsum(qx)))[:-1] + 0.5 * qx) / big
        iy = (np.concatenate(([0.0], np.cumsum(qy)))[:-1] + 0.5 * qy) / big
        d = iy - ix
    num = float(np.mean(np.maximum(d, 0.0) ** 2))
    den = float(np.mean(d * d))
    return num, den


def random_small_support(rng, max_support=6, low=-5.0, high=5.0):
    """Random sample vector with at most ``max_support`` distinct values."""
    support = rng.integers(1, max_support + 1)
    values = rng.uniform(low, high, support)
    counts = rng.integers(1, 4, support)
    return np.repeat(values, counts)
