"""Consensus ranking: minimize a weighted rank-distance objective over S_k.

Rankings are orderings, best first: ``(2, 0, 1)`` says model 2 is best.  The
rank vector of an ordering assigns each model its position (here model 2 has
rank 0).  Two distances between orderings are supported:

* spearman -- sum of squared rank differences, the permutation analogue of
  Pearson correlation on rank vectors;
* kendall -- number of discordant pairs (pairs of models the two orderings
  order oppositely).

:func:`aggregate` finds the ordering minimizing the weighted sum of
distances to the inputs: exhaustively for small k, otherwise by
steepest-descent over all pairwise transpositions from multiple starts (a
weighted-mean-rank start, every input ranking, and seeded random restarts up
to 20 total).  Starting from the inputs guarantees the output objective
never exceeds any input's own objective.  Co-optimal orderings resolve to
the lexicographically smallest, so results are fully deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    EmptyInput,
    InvalidPermutation,
    TooLarge,
    WeightMismatch,
)

DISTANCES = ("spearman", "kendall")

_ORACLE_LIMIT = 9
_N_RESTARTS = 20
_RESTART_SEED = 7

_WEIGHT_TOL = 1e-9


def _rank_vector(ordering) -> np.ndarray:
    """Position of each model in a best-first ordering."""
    ordering = np.asarray(ordering, dtype=np.int64)
    ranks = np.empty_like(ordering)
    ranks[ordering] = np.arange(len(ordering))
    return ranks


def _check_permutation(ordering, k: int) -> tuple[int, ...]:
    perm = tuple(int(v) for v in ordering)
    if len(perm) != k or sorted(perm) != list(range(k)):
        raise InvalidPermutation(f"{perm} is not a permutation of 0..{k - 1}")
    return perm


def spearman_distance(p, q) -> float:
    """Sum of squared rank differences between two orderings."""
    k = len(p)
    rp = _rank_vector(_check_permutation(p, k))
    rq = _rank_vector(_check_permutation(q, k))
    return float(((rp - rq) ** 2).sum())


def kendall_distance(p, q) -> float:
    """Number of model pairs the two orderings order oppositely."""
    k = len(p)
    rp = _rank_vector(_check_permutation(p, k))
    rq = _rank_vector(_check_permutation(q, k))
    dp = np.sign(rp[:, None] - rp[None, :])
    dq = np.sign(rq[:, None] - rq[None, :])
    return float((dp * dq < 0).sum() / 2)


@dataclass(frozen=True)
class RankingSet:
    """N input orderings over the same k models, with importance weights
    (a probability vector, renormalized on construction)."""

    rankings: tuple[tuple[int, ...], ...]
    weights: np.ndarray

    def __post_init__(self):
        if len(self.rankings) == 0:
            raise EmptyInput("need at least one ranking")
        k = len(self.rankings[0])
        if k == 0:
            raise EmptyInput("rankings must not be empty")
        rankings = tuple(_check_permutation(r, k) for r in self.rankings)
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (len(rankings),):
            raise WeightMismatch("need one weight per ranking")
        total = weights.sum()
        if np.any(weights < 0) or abs(total - 1.0) > _WEIGHT_TOL:
            raise WeightMismatch("weights must be non-negative and sum to 1")
        object.__setattr__(self, "rankings", rankings)
        object.__setattr__(self, "weights", weights / total)

    @classmethod
    def uniform(cls, rankings) -> "RankingSet":
        rankings = tuple(tuple(r) for r in rankings)
        if not rankings:
            raise EmptyInput("need at least one ranking")
        return cls(rankings, np.full(len(rankings), 1.0 / len(rankings)))

    @property
    def k(self) -> int:
        return len(self.rankings[0])


class _Objective:
    """Weighted distance-sum evaluator with the input ranks precomputed."""

    def __init__(self, rs: RankingSet, distance: str):
        if distance not in DISTANCES:
            raise DomainError(f"distance must be one of {DISTANCES}")
        self.distance = distance
        self.weights = rs.weights
        self.ranks = np.stack([_rank_vector(r) for r in rs.rankings])  # (N, k)
        if distance == "kendall":
            d = self.ranks[:, :, None] - self.ranks[:, None, :]
            self._signs = np.sign(d)  # (N, k, k)

    def __call__(self, ordering) -> float:
        ranks = _rank_vector(ordering)
        if self.distance == "spearman":
            per_input = ((self.ranks - ranks) ** 2).sum(axis=1)
        else:
            d = np.sign(ranks[:, None] - ranks[None, :])
            per_input = (self._signs * d < 0).sum(axis=(1, 2)) / 2
        return float(per_input @ self.weights)


def objective(rs: RankingSet, ordering, distance: str = "spearman") -> float:
    """Weighted sum of distances from ``ordering`` to every input ranking."""
    return _Objective(rs, distance)(_check_permutation(ordering, rs.k))


def _mean_rank_start(rs: RankingSet) -> tuple[int, ...]:
    """Order models by weighted mean input rank (ties by model index).

    For the spearman objective this is already an exact minimizer: the
    objective separates into a term linear in the candidate's rank vector,
    maximized by assigning the best positions to the smallest mean ranks.
    """
    mean_rank = rs.weights @ np.stack([_rank_vector(r) for r in rs.rankings])
    return tuple(sorted(range(rs.k), key=lambda m: (mean_rank[m], m)))


def _descend(start: tuple[int, ...], obj: _Objective) -> tuple[float, tuple[int, ...]]:
    """Steepest-descent over all pairwise transpositions of the ordering."""
    current = list(start)
    value = obj(current)
    k = len(current)
    while True:
        best = (value, tuple(current))
        for i in range(k - 1):
            for j in range(i + 1, k):
                current[i], current[j] = current[j], current[i]
                cand = (obj(current), tuple(current))
                current[i], current[j] = current[j], current[i]
                if cand < best:
                    best = cand
        if best[0] >= value:
            return value, tuple(current)
        value, new = best
        current = list(new)


def aggregate(
    rs: RankingSet, distance: str = "spearman", k_exhaustive_limit: int = 8
) -> tuple[int, ...]:
    """Consensus ordering minimizing the weighted rank-distance objective.

    Exhaustive over S_k when k <= k_exhaustive_limit, heuristic otherwise;
    ties resolve to the lexicographically smallest ordering.
    """
    obj = _Objective(rs, distance)
    if rs.k <= k_exhaustive_limit:
        return _exhaustive(rs.k, obj)
    starts = [_mean_rank_start(rs)]
    starts.extend(rs.rankings)
    rng = np.random.default_rng(_RESTART_SEED)
    while len(starts) < _N_RESTARTS:
        starts.append(tuple(int(v) for v in rng.permutation(rs.k)))
    results = [_descend(s, obj) for s in dict.fromkeys(starts)]
    return min(results)[1]


def _exhaustive(k: int, obj: _Objective) -> tuple[int, ...]:
    best_val = np.inf
    best_perm = None
    for perm in itertools.permutations(range(k)):
        v = obj(perm)
        if v < best_val:
            best_val, best_perm = v, perm
    return best_perm


def aggregate_oracle(rs: RankingSet, distance: str = "spearman") -> tuple[int, ...]:
    """Brute-force exhaustive minimizer (same tie-break); k <= 9 only."""
    if rs.k > _ORACLE_LIMIT:
        raise TooLarge(f"exhaustive search limited to k <= {_ORACLE_LIMIT}")
    return _exhaustive(rs.k, _Objective(rs, distance))
