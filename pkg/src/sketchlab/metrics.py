"""Error functionals and Monte-Carlo experiments.

Covers the point error |x̂_i - x_i|, the top-k error (distance from x
to the nearest vector whose top-k restriction matches the estimate's),
the empirical normalizer m(R, C) = R**-0.5 * C**-0.8, tail-probability
curves with fitted slopes, and the Count-Min comparison.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .estimators import EstimateVector, estimate_items, estimate_vector, top_k_indices
from .hashing import derive_seed
from .sketch import COUNT_MIN, COUNT_SKETCH, SketchConfig, SketchTable
from .signals import SignalSpec, tail_stats

HIST_BINS = 60
TRIM_QUANTILE = 99.9  # samples beyond this percentile are dropped from means


def m_value(rows: int, columns: int) -> float:
    """Empirical point-error normalizer R**-0.5 * C**-0.8."""
    return rows ** -0.5 * columns ** -0.8


def topk_error(x: np.ndarray, xhat: EstimateVector | np.ndarray, k: int) -> float:
    """Distance from x to the nearest x' whose top-k equals the estimate's.

    Closed form: the k selected coordinates are pinned to the estimated
    values; every other coordinate is clamped to the selection's minimum
    magnitude.  Certified against the brute-force oracle on small grids.
    """
    x = np.asarray(x, dtype=np.float64)
    xh = xhat.values if isinstance(xhat, EstimateVector) else np.asarray(xhat, dtype=np.float64)
    if len(x) != len(xh):
        raise ValueError(f"length mismatch: {len(x)} vs {len(xh)}")
    if not 1 <= k <= len(x):
        raise ValueError(f"k must be in [1, {len(x)}], got {k}")
    top = top_k_indices(xh, k)
    m_star = np.abs(xh[top]).min()
    mask = np.zeros(len(x), dtype=bool)
    mask[top] = True
    head_sq = np.sum((x[top] - xh[top]) ** 2)
    rest_sq = np.sum(np.maximum(0.0, np.abs(x[~mask]) - m_star) ** 2)
    return float(np.sqrt(head_sq + rest_sq))


@dataclass
class Histogram:
    bin_edges: np.ndarray
    density: np.ndarray
    mean: float     # after dropping mass beyond TRIM_QUANTILE
    stddev: float
    count: int


def make_histogram(samples: np.ndarray, bins: int = HIST_BINS) -> Histogram:
    """Uniform bins over [0, 99.5th percentile]; trimmed mean/stddev."""
    samples = np.asarray(samples, dtype=np.float64)
    hi = np.percentile(samples, 99.5)
    if hi <= 0:
        hi = max(samples.max(), 1e-300)
    edges = np.linspace(0.0, hi, bins + 1)
    density, _ = np.histogram(np.clip(samples, 0, hi), bins=edges, density=True)
    kept = samples[samples <= np.percentile(samples, TRIM_QUANTILE)]
    return Histogram(edges, density, float(kept.mean()), float(kept.std()),
                     len(samples))


def _map_trials(fn, trials: int, threads: int) -> list:
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _trial_table(signal: SignalSpec, config: SketchConfig, trial: int,
                 kind: str | None = None):
    x = signal.generate(seed=derive_seed(signal.seed, trial, 1))
    cfg = SketchConfig(config.rows, config.columns,
                       derive_seed(config.master_seed, trial, 2),
                       kind or config.kind)
    return x, SketchTable.from_vector(cfg, x)


@dataclass
class PointErrorResult:
    histogram: Histogram
    samples: np.ndarray  # E_p / m(R, C)
    m: float
    config: SketchConfig


def point_error_experiment(signal: SignalSpec, config: SketchConfig,
                           trials: int, coords_per_trial: int = 1,
                           threads: int = 1) -> PointErrorResult:
    """Normalized point errors at uniformly random coordinates."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    m = m_value(config.rows, config.columns)

    def one(trial: int) -> np.ndarray:
        x, table = _trial_table(signal, config, trial)
        rng = np.random.default_rng(derive_seed(signal.seed, trial, 3))
        idx = rng.integers(0, signal.n, coords_per_trial)
        est = estimate_items(table, idx.astype(np.uint64))
        return np.abs(est - x[idx]) / m

    samples = np.concatenate(_map_trials(one, trials, threads))
    return PointErrorResult(make_histogram(samples), samples, m, config)


@dataclass
class TailCurve:
    t_grid: np.ndarray
    probs: np.ndarray
    halfwidths: np.ndarray
    samples: int
    slope: Optional[float]
    intercept: Optional[float]
    r_squared: Optional[float]
    degenerate: bool


def fit_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Unweighted least squares; returns (slope, intercept, R^2)."""
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 if total == 0 else 1.0 - float(np.sum(resid ** 2)) / float(total)
    return float(slope), float(intercept), r2


def tail_curve_experiment(signal: SignalSpec, config: SketchConfig, k: int,
                          t_grid: Sequence[float], trials: int,
                          coords_per_trial: int = 1,
                          threads: int = 1) -> TailCurve:
    """Pr[(x̂_i - x_i)^2 > (t/R) * tail_norm_sq/k] per t, plus log-slope."""
    t_grid = np.asarray(sorted(t_grid), dtype=np.float64)
    if np.any(t_grid <= 0) or np.any(t_grid > config.rows):
        raise ValueError("t grid must lie in (0, R]")

    def one(trial: int) -> np.ndarray:
        x, table = _trial_table(signal, config, trial)
        stats = tail_stats(x, k)
        rng = np.random.default_rng(derive_seed(signal.seed, trial, 3))
        idx = rng.integers(0, signal.n, coords_per_trial)
        est = estimate_items(table, idx.astype(np.uint64))
        sq = (est - x[idx]) ** 2
        scale = stats.tail_norm_sq / k / config.rows
        # one exceedance count per t
        return (sq[None, :] > t_grid[:, None] * scale).sum(axis=1)

    counts = np.sum(_map_trials(one, trials, threads), axis=0)
    total = trials * coords_per_trial
    probs = counts / total
    halfwidths = 1.96 * np.sqrt(probs * (1 - probs) / total)

    usable = (probs >= 10 / total) & (probs <= 0.5)
    if usable.sum() >= 2:
        slope, intercept, r2 = fit_line(t_grid[usable], np.log(probs[usable]))
        return TailCurve(t_grid, probs, halfwidths, total, slope, intercept,
                         r2, False)
    return TailCurve(t_grid, probs, halfwidths, total, None, None, None, True)


@dataclass
class TopkResult:
    samples: np.ndarray  # E_k / (m * sqrt(k))
    mean_normalized: float
    variance_ratio: float  # Var[E_k / E[E_k]]
    m: float
    k: int


def topk_experiment(signal: SignalSpec, config: SketchConfig, k: int,
                    trials: int, threads: int = 1) -> TopkResult:
    """Per-trial top-k errors, normalized by m(R, C) * sqrt(k)."""
    if 2 * k > signal.n:
        raise ValueError(f"need 2k <= n, got k={k}, n={signal.n}")
    m = m_value(config.rows, config.columns)

    def one(trial: int) -> float:
        x, table = _trial_table(signal, config, trial)
        xhat = estimate_vector(table, signal.n)
        return topk_error(x, xhat, k)

    errors = np.asarray(_map_trials(one, trials, threads))
    kept = errors[errors <= np.percentile(errors, TRIM_QUANTILE)]
    mean = kept.mean()
    var_ratio = float(np.var(kept / mean)) if mean > 0 else 0.0
    return TopkResult(errors / (m * np.sqrt(k)), float(mean / (m * np.sqrt(k))),
                      var_ratio, m, k)


@dataclass
class CountMinComparison:
    cs_histogram: Histogram
    cm_histogram: Histogram
    cs_samples: np.ndarray
    cm_samples: np.ndarray
    mean_ratio: float      # mean CM error / mean CS error
    cm_mean_bias: float    # mean(est - x) for Count-Min, positive


def countmin_comparison(signal: SignalSpec, config: SketchConfig,
                        trials: int, coords_per_trial: int = 1,
                        threads: int = 1) -> CountMinComparison:
    """Same sampling protocol for both sketches at matched (R, C)."""
    probe = signal.generate()
    if np.any(probe < 0):
        raise ValueError("Count-Min comparison requires a nonnegative signal")
    m = m_value(config.rows, config.columns)

    def one(trial: int):
        x, cs_table = _trial_table(signal, config, trial, kind=COUNT_SKETCH)
        cm_table = SketchTable.from_vector(
            SketchConfig(config.rows, config.columns,
                         cs_table.config.master_seed, COUNT_MIN), x)
        rng = np.random.default_rng(derive_seed(signal.seed, trial, 3))
        idx = rng.integers(0, signal.n, coords_per_trial).astype(np.uint64)
        cs_est = estimate_items(cs_table, idx)
        cm_est = estimate_items(cm_table, idx)
        truth = x[idx.astype(np.int64)]
        return (np.abs(cs_est - truth) / m, np.abs(cm_est - truth) / m,
                (cm_est - truth) / m)

    parts = _map_trials(one, trials, threads)
    cs = np.concatenate([p[0] for p in parts])
    cm = np.concatenate([p[1] for p in parts])
    bias = np.concatenate([p[2] for p in parts])
    return CountMinComparison(make_histogram(cs), make_histogram(cm), cs, cm,
                              float(cm.mean() / cs.mean()), float(bias.mean()))


def bootstrap_mean_ratio_ci(num: np.ndarray, den: np.ndarray,
                            n_boot: int = 2000, seed: int = 0,
                            level: float = 0.95) -> tuple[float, float]:
    """Percentile bootstrap CI for mean(num) / mean(den)."""
    rng = np.random.default_rng(seed)
    ratios = np.empty(n_boot)
    for b in range(n_boot):
        ratios[b] = (num[rng.integers(0, len(num), len(num))].mean()
                     / den[rng.integers(0, len(den), len(den))].mean())
    lo = (1 - level) / 2
    return (float(np.quantile(ratios, lo)), float(np.quantile(ratios, 1 - lo)))
