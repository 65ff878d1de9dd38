"""Bootstrap significance tests and multi-model ranking on violation ratios.

Two families of one-sided tests, both rejecting for small statistics:

* absolute: H0 "eps(X, Y) > eps0" against dominance up to a tolerated
  violation eps0.  Reject when

      eps_hat <= eps0 + sqrt((m+n)/(m n)) * sigma_hat * Phi^(-1)(alpha),

  where sigma_hat estimates the standard deviation of the rate-scaled
  statistic ``sqrt(mn/(m+n)) * eps_hat``.  The bootstrap standard deviation
  of eps_hat itself already sits at the statistic's scale, so sigma_hat is
  that raw deviation divided by the rate; the two rate factors cancel in the
  threshold.  Phi^(-1)(alpha) < 0 for alpha < 1/2: the correction tightens
  the comparison, it never loosens it.

* relative: H0 "model i is not better than model j" in terms of one-vs-all
  ratios.  With eps_i the average violation ratio of i over the other k-1
  models and delta_ij = eps_i - eps_j, reject when

      delta_hat <= sqrt(1/n) * sigma_hat * Phi^(-1)(alpha),

  sigma_hat estimating the deviation of sqrt(n) * delta_hat.

:func:`multi_test` runs every ordered pair at the Bonferroni level
alpha / k^2 from one shared cache of B resamples per model (resampling once
and reusing it across all pairs is what makes k=12, B=1000 tractable), then
ranks models by Borda count of the win matrix.

Determinism: resampling streams are keyed by (seed, iteration) only, with
iteration (b-1)*k + j for model j in bootstrap round b, or b-1 shared by all
models when ``paired`` (one index vector per round).  Reruns with equal
inputs and config reproduce results exactly, regardless of threading.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable

import numpy as np

from . import dominance
from .empirical import BootstrapSeed, EmpiricalDistribution, _uniform_indices
from .errors import DomainError, NeedAtLeastTwo, UnequalSampleSizes

_MODES = ("absolute", "relative")

_phi_inv = NormalDist().inv_cdf


@dataclass(frozen=True)
class TestConfig:
    """Shared knobs for all tests.

    eps0 is the absolute test's tolerated violation ratio and must be set
    (in (0, 0.5]) for absolute mode; alpha is applied exactly as given by the
    pairwise tests, while multi_test divides it by k^2 first.
    """

    order: int = 1
    mode: str = "relative"
    eps0: float | None = None
    alpha: float = 0.05
    n_boot: int = 1000
    seed: int = 0
    paired: bool = False

    def __post_init__(self):
        if self.order not in (1, 2):
            raise DomainError("order must be 1 or 2")
        if self.mode not in _MODES:
            raise DomainError(f"mode must be one of {_MODES}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        if self.n_boot < 2:
            raise DomainError("need at least two bootstrap iterations")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")
        if self.mode == "absolute":
            if self.eps0 is None:
                raise DomainError("absolute mode needs eps0")
            if not 0.0 < self.eps0 <= 0.5:
                raise DomainError("eps0 must lie in (0, 0.5]")


@dataclass(frozen=True)
class PairwiseTestResult:
    statistic: float
    sigma_hat: float  # std estimate of the rate-scaled statistic
    threshold: float
    reject_h0: bool
    confidence: float  # 1 - alpha as applied
    degenerate: bool = False


@dataclass(frozen=True)
class WinMatrix:
    """wins[i, j] is True when i's test against j rejected its H0."""

    wins: np.ndarray
    corrected_alpha: float


@dataclass(frozen=True)
class Ranking:
    """Model indices best-first with their Borda scores (win counts)."""

    order: tuple[int, ...]
    borda_scores: tuple[int, ...]
    confidence: float


@dataclass(frozen=True)
class MultiTestResult:
    win_matrix: WinMatrix
    ranking: Ranking
    ratios: dominance.PairwiseRatios
    sigma: np.ndarray  # (k, k) sigma_hat per ordered pair
    eps_one: np.ndarray  # one-vs-all ratios at the tested order
    delta: np.ndarray  # eps_one differences (relative statistic matrix)


def _absolute_rule(stat, sd_raw, n, m, eps0: float, alpha: float):
    """Vectorized absolute decision; returns (sigma_hat, threshold, reject)."""
    rate = np.sqrt((n + m) / (n * m))
    sigma_hat = sd_raw / rate
    threshold = eps0 + rate * sigma_hat * _phi_inv(alpha)
    return sigma_hat, threshold, stat <= threshold


def _relative_rule(stat, sd_raw, n, alpha: float):
    sigma_hat = np.sqrt(n) * sd_raw
    threshold = np.sqrt(1.0 / n) * sigma_hat * _phi_inv(alpha)
    return sigma_hat, threshold, stat <= threshold


class _Engine:
    """Resample cache plus violation-ratio tensors for one model set."""

    def __init__(self, dists: list[EmpiricalDistribution], cfg: TestConfig):
        if len(dists) < 2:
            raise NeedAtLeastTwo("tests compare at least two distributions")
        if cfg.paired and len({d.n for d in dists}) > 1:
            raise UnequalSampleSizes("paired resampling needs equal sample sizes")
        self.dists = dists
        self.cfg = cfg
        self.k = len(dists)
        self.sizes = np.array([d.n for d in dists])
        self.scales = [float(np.max(np.abs(d.values))) for d in dists]
        self.mats = [self._resample_matrix(j) for j in range(self.k)]
        self._tensors: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def _resample_matrix(self, j: int) -> np.ndarray:
        d = self.dists[j]
        cfg = self.cfg
        idx = np.empty((cfg.n_boot, d.n), dtype=np.int64)
        for b in range(cfg.n_boot):
            it = b if cfg.paired else b * self.k + j
            rng = BootstrapSeed(cfg.seed, it).generator()
            idx[b] = _uniform_indices(rng, d.n, d.n)
        out = np.empty((cfg.n_boot + 1, d.n))
        out[0] = d.values
        out[1:] = np.sort(d.values[idx], axis=1)
        return out

    def eps_tensor(self, order: int):
        """(B+1, k, k) ratio tensor and the (k, k) original degenerate mask."""
        if order in self._tensors:
            return self._tensors[order]
        k = self.k
        rows = self.cfg.n_boot + 1
        eps = np.zeros((rows, k, k))
        degen0 = np.zeros((k, k), dtype=bool)
        seg_cache: dict[tuple[int, int], dominance.Segments] = {}
        for i in range(k):
            for j in range(i + 1, k):
                key = (self.dists[i].n, self.dists[j].n)
                if key not in seg_cache:
                    seg_cache[key] = dominance.merged_segments(*key)
                num, den = dominance.pair_parts(
                    self.mats[i], self.mats[j], seg_cache[key], order
                )
                scale = max(self.scales[i], self.scales[j])
                e, degen = dominance._ratio_with_flag(num, den, scale)
                eps[:, i, j] = e
                eps[:, j, i] = 1.0 - e
                degen0[i, j] = degen0[j, i] = bool(degen[0])
        self._tensors[order] = (eps, degen0)
        return eps, degen0


def bootstrap_sigma(
    dists: list[EmpiricalDistribution],
    statistic: Callable[[list[EmpiricalDistribution]], float],
    cfg: TestConfig,
) -> float:
    """Bootstrap standard deviation (divisor B-1) of an arbitrary statistic.

    Each of the B iterations resamples every distribution (size preserved)
    from its own deterministic stream -- or one shared stream per iteration
    when ``cfg.paired``, which shares the index vector across equally sized
    samples -- and evaluates ``statistic`` on the resampled list.
    """
    k = len(dists)
    if k == 0:
        raise NeedAtLeastTwo("bootstrap_sigma needs at least one distribution")
    if cfg.paired and len({d.n for d in dists}) > 1:
        raise UnequalSampleSizes("paired resampling needs equal sample sizes")
    vals = np.empty(cfg.n_boot)
    for b in range(cfg.n_boot):
        resampled = [
            d.resample(d.n, BootstrapSeed(cfg.seed, b if cfg.paired else b * k + j))
            for j, d in enumerate(dists)
        ]
        vals[b] = statistic(resampled)
    return float(np.std(vals, ddof=1))


def absolute_test(
    x: EmpiricalDistribution, y: EmpiricalDistribution, cfg: TestConfig
) -> PairwiseTestResult:
    """Test dominance of x over y up to violation eps0, at cfg.alpha.

    A degenerate (near-identical) pair is reported as a no-decision:
    statistic 0.5, reject_h0 False, degenerate True.
    """
    if cfg.eps0 is None or not 0.0 < cfg.eps0 <= 0.5:
        raise DomainError("absolute test needs eps0 in (0, 0.5]")
    eng = _Engine([x, y], cfg)
    eps, degen0 = eng.eps_tensor(cfg.order)
    e = eps[:, 0, 1]
    sd_raw = float(np.std(e[1:], ddof=1))
    sigma_hat, threshold, reject = _absolute_rule(
        float(e[0]), sd_raw, x.n, y.n, cfg.eps0, cfg.alpha
    )
    degenerate = bool(degen0[0, 1])
    return PairwiseTestResult(
        statistic=float(e[0]),
        sigma_hat=float(sigma_hat),
        threshold=float(threshold),
        reject_h0=bool(reject) and not degenerate,
        confidence=1.0 - cfg.alpha,
        degenerate=degenerate,
    )


def relative_test(
    dists: list[EmpiricalDistribution], i: int, j: int, cfg: TestConfig
) -> PairwiseTestResult:
    """Test "model i beats model j" through one-vs-all ratios, at cfg.alpha."""
    _require_equal_sizes(dists)
    eng = _Engine(dists, cfg)
    eps, degen0 = eng.eps_tensor(cfg.order)
    eps_one = eps.sum(axis=2) / (eng.k - 1)
    delta = eps_one[:, i] - eps_one[:, j]
    sd_raw = float(np.std(delta[1:], ddof=1))
    sigma_hat, threshold, reject = _relative_rule(
        float(delta[0]), sd_raw, dists[i].n, cfg.alpha
    )
    degenerate = bool(degen0[i, j]) if i != j else False
    return PairwiseTestResult(
        statistic=float(delta[0]),
        sigma_hat=float(sigma_hat),
        threshold=float(threshold),
        reject_h0=bool(reject) and i != j and not degenerate,
        confidence=1.0 - cfg.alpha,
        degenerate=degenerate,
    )


def _require_equal_sizes(dists):
    if len(dists) < 2:
        raise NeedAtLeastTwo("need at least two distributions")
    if len({d.n for d in dists}) > 1:
        raise UnequalSampleSizes(
            "relative comparisons need one common sample size"
        )


def borda_rank(
    w: WinMatrix, tiebreak, confidence: float | None = None
) -> Ranking:
    """Order models by win count, breaking ties by smaller one-vs-all ratio
    (the ``tiebreak`` vector) and then by smaller index.

    When ``confidence`` is omitted it is recovered from the win matrix's
    corrected level (1 - corrected_alpha * k^2).
    """
    wins = np.asarray(w.wins, dtype=bool)
    if wins.ndim != 2 or wins.shape[0] != wins.shape[1]:
        raise DomainError("win matrix must be square")
    if confidence is None:
        confidence = 1.0 - w.corrected_alpha * wins.shape[0] ** 2
    tiebreak = np.asarray(tiebreak, dtype=np.float64)
    scores = wins.sum(axis=1)
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], tiebreak[i], i))
    return Ranking(
        order=tuple(order),
        borda_scores=tuple(int(s) for s in scores),
        confidence=float(confidence),
    )


def _decide(eng: _Engine, order: int, mode: str, cfg: TestConfig) -> MultiTestResult:
    eps, degen0 = eng.eps_tensor(order)
    k = eng.k
    alpha_c = cfg.alpha / k**2
    eps_one_all = eps.sum(axis=2) / (k - 1)  # (B+1, k)
    eps_one = eps_one_all[0]
    delta0 = eps_one[:, None] - eps_one[None, :]
    if mode == "relative":
        delta = eps_one_all[:, :, None] - eps_one_all[:, None, :]
        sd_raw = np.std(delta[1:], axis=0, ddof=1)
        sigma, _, reject = _relative_rule(delta0, sd_raw, eng.sizes[0], alpha_c)
    else:
        sd_raw = np.std(eps[1:], axis=0, ddof=1)
        n_i = eng.sizes[:, None]
        n_j = eng.sizes[None, :]
        sigma, _, reject = _absolute_rule(eps[0], sd_raw, n_i, n_j, cfg.eps0, alpha_c)
    # a degenerate (identical-sample) pair is a no-decision in either mode
    wins = reject & ~degen0
    np.fill_diagonal(wins, False)
    wm = WinMatrix(wins=wins, corrected_alpha=alpha_c)
    ranking = borda_rank(wm, eps_one, 1.0 - cfg.alpha)
    return MultiTestResult(
        win_matrix=wm,
        ranking=ranking,
        ratios=dominance.pairwise_ratios(eng.dists),
        sigma=sigma,
        eps_one=eps_one,
        delta=delta0,
    )


def multi_test(dists: list[EmpiricalDistribution], cfg: TestConfig) -> MultiTestResult:
    """All-pairs testing at level alpha / k^2 plus Borda ranking.

    One cache of B resamples per model feeds every pairwise statistic, its
    bootstrap deviation, and (in relative mode) the one-vs-all averages, as
    in running each pairwise test with alpha replaced by alpha / k^2.
    """
    if cfg.mode == "relative":
        _require_equal_sizes(dists)
    elif cfg.eps0 is None:
        raise DomainError("absolute mode needs eps0")
    eng = _Engine(dists, cfg)
    return _decide(eng, cfg.order, cfg.mode, cfg)


def run_battery(
    dists: list[EmpiricalDistribution],
    cfg: TestConfig,
    orders=(1, 2),
    modes=("relative", "absolute"),
) -> dict[tuple[int, str], MultiTestResult]:
    """multi_test for several (order, mode) combinations off one shared cache.

    Statistics for each order are computed once and reused by both decision
    modes, so a full battery costs barely more than a single multi_test.
    """
    if "relative" in modes:
        _require_equal_sizes(dists)
    if "absolute" in modes and cfg.eps0 is None:
        raise DomainError("absolute mode needs eps0")
    eng = _Engine(dists, cfg)
    return {
        (order, mode): _decide(eng, order, mode, cfg)
        for order in orders
        for mode in modes
    }


VALIDATION_SIZES = (100, 250, 500, 1000, 2000)
VALIDATION_TESTS = ("rel_fsd", "rel_ssd", "abs_fsd", "abs_ssd")


def validate_gaussian(
    sizes=VALIDATION_SIZES,
    trials: int = 200,
    seed: int = 0,
    alpha: float = 0.05,
    tau: float = 0.45,
    n_boot: int = 1000,
) -> list[dict]:
    """True-positive rates of all four tests on a known dominant pair.

    Per trial, n samples of X ~ N(0.5, sd 2) and Y ~ N(0, 1) are drawn (X
    dominates Y approximately at both orders), then the absolute tests at
    eps0 = tau and the k=2 relative tests run at plain alpha.  Returns one
    row per (n, test) with the fraction of trials that declared dominance.
    """
    rows = []
    for n in sizes:
        hits = dict.fromkeys(VALIDATION_TESTS, 0)
        for t in range(trials):
            rng = np.random.default_rng((seed, n, t))
            x = EmpiricalDistribution.from_samples(rng.normal(0.5, 2.0, n))
            y = EmpiricalDistribution.from_samples(rng.normal(0.0, 1.0, n))
            cfg = TestConfig(
                order=1, mode="absolute", eps0=tau, alpha=alpha,
                n_boot=n_boot, seed=int(rng.integers(2**62)),
            )
            eng = _Engine([x, y], cfg)
            for order, label in ((1, "fsd"), (2, "ssd")):
                eps, _ = eng.eps_tensor(order)
                e = eps[:, 0, 1]
                sd_e = float(np.std(e[1:], ddof=1))
                _, _, rej_abs = _absolute_rule(float(e[0]), sd_e, n, n, tau, alpha)
                delta = 2.0 * e - 1.0  # k=2 one-vs-all difference
                sd_d = float(np.std(delta[1:], ddof=1))
                _, _, rej_rel = _relative_rule(float(delta[0]), sd_d, n, alpha)
                hits[f"abs_{label}"] += int(rej_abs)
                hits[f"rel_{label}"] += int(rej_rel)
        for name in VALIDATION_TESTS:
            rows.append({"n": n, "test": name, "tpr": hits[name] / trials})
    return rows
