"""Direct numerical checks of the probability facts the sketch relies on.

Independent of the sketch machinery: small-ball lower bounds for
symmetric zero-heavy sums, the triangle-filter lower bound, median
Chernoff tails, the coordinate-wise-median norm bound, and the exact
median-of-median-of-medians identity over all partitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

from .backend import kernels
from .errors import DegenerateSpecError

EXACT_STATE_LIMIT = 3 ** 12


@dataclass(frozen=True)
class SymmetricSumSpec:
    """Sum of independent symmetric terms, each 0 with probability >= 1/2.

    terms: tuple of (magnitude, zero_probability); term i is 0 with the
    given probability and otherwise +-magnitude with equal odds.
    """

    terms: tuple

    def __post_init__(self):
        for mag, p in self.terms:
            if not math.isfinite(mag):
                raise ValueError(f"magnitude must be finite, got {mag}")
            if not 0.5 <= p <= 1.0:
                raise ValueError(f"zero probability must be in [1/2, 1], got {p}")

    @classmethod
    def iid(cls, count: int, magnitude: float = 1.0,
            zero_probability: float = 0.5) -> "SymmetricSumSpec":
        return cls(((magnitude, zero_probability),) * count)

    @property
    def variance(self) -> float:
        return sum((1.0 - p) * mag * mag for mag, p in self.terms)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def support_states(self) -> int:
        states = 1
        for mag, p in self.terms:
            if mag != 0.0 and p < 1.0:
                states *= 3
        return states


class ProbEstimate(NamedTuple):
    value: float
    halfwidth: float  # 0 for exact enumeration
    exact: bool


@lru_cache(maxsize=32)
def _exact_distribution(spec: SymmetricSumSpec):
    dist = {0.0: 1.0}
    for mag, p in spec.terms:
        if mag == 0.0 or p == 1.0:
            continue
        half = (1.0 - p) / 2.0
        new: dict[float, float] = {}
        for v, pr in dist.items():
            for dv, dp in ((0.0, p), (mag, half), (-mag, half)):
                key = v + dv
                new[key] = new.get(key, 0.0) + pr * dp
        dist = new
    values = np.fromiter(dist.keys(), dtype=np.float64)
    probs = np.fromiter(dist.values(), dtype=np.float64)
    return values, probs


def _sample_sum(spec: SymmetricSumSpec, trials: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    mags = np.array([m for m, _ in spec.terms])
    zero_ps = np.array([p for _, p in spec.terms])
    nonzero = rng.random((trials, len(mags))) >= zero_ps
    signs = np.where(rng.random((trials, len(mags))) < 0.5, 1.0, -1.0)
    return (nonzero * signs * mags).sum(axis=1)


def _check_spec(spec: SymmetricSumSpec, eps: float) -> float:
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    sigma = spec.sigma
    if sigma == 0.0:
        raise DegenerateSpecError("spec has zero variance")
    return sigma


def small_ball_probability(spec: SymmetricSumSpec, eps: float,
                           trials: int = 200_000,
                           seed: int = 0) -> ProbEstimate:
    """Pr[|X| < eps * sigma]; exact when the joint support is small."""
    sigma = _check_spec(spec, eps)
    if spec.support_states() <= EXACT_STATE_LIMIT:
        values, probs = _exact_distribution(spec)
        return ProbEstimate(float(probs[np.abs(values) < eps * sigma].sum()),
                            0.0, True)
    x = _sample_sum(spec, trials, seed)
    p = float(np.mean(np.abs(x) < eps * sigma))
    return ProbEstimate(p, 1.96 * math.sqrt(p * (1 - p) / trials), False)


def triangle_filter_expectation(spec: SymmetricSumSpec, eps: float,
                                trials: int = 200_000,
                                seed: int = 0) -> ProbEstimate:
    """E[T_eps(X/sigma)] with T the tent 1 - |x|/eps on [-eps, eps].

    Always a lower bound for the small-ball probability at the same eps.
    """
    sigma = _check_spec(spec, eps)
    if spec.support_states() <= EXACT_STATE_LIMIT:
        values, probs = _exact_distribution(spec)
        t = np.maximum(0.0, 1.0 - np.abs(values / sigma) / eps)
        return ProbEstimate(float((t * probs).sum()), 0.0, True)
    x = _sample_sum(spec, trials, seed)
    t = np.maximum(0.0, 1.0 - np.abs(x / sigma) / eps)
    return ProbEstimate(float(t.mean()),
                        1.96 * float(t.std()) / math.sqrt(trials), False)


class MedianTailResult(NamedTuple):
    frequency: float
    bound: float  # 2 * exp(-t p^2 / 2)
    stderr: float


def median_tail_probability(p: float, t: int, trials: int = 100_000,
                            seed: int = 0, margin: float = 0.5,
                            x: float = 1.0) -> MedianTailResult:
    """Empirical Pr[|median of t symmetric vars| >= x].

    Each variable lands uniformly inside (-x, x) with probability p and
    otherwise sits at +-x*(1 + margin) with equal odds.
    """
    if not 0.0 < p <= 1.0 or t < 1:
        raise ValueError(f"need p in (0, 1] and t >= 1, got p={p}, t={t}")
    rng = np.random.default_rng(seed)
    inside = rng.random((trials, t)) < p
    signs = np.where(rng.random((trials, t)) < 0.5, 1.0, -1.0)
    vals = np.where(inside, rng.uniform(-x, x, (trials, t)),
                    signs * x * (1.0 + margin))
    med = np.abs(np.median(vals, axis=1))
    freq = float(np.mean(med >= x))
    bound = 2.0 * math.exp(-t * p * p / 2.0)
    return MedianTailResult(freq, bound, math.sqrt(max(freq, bound) / trials))


class VectorMedianResult(NamedTuple):
    ratio: float          # ||median|| / C_bound
    premise_met: bool     # >= ceil(3r/4) inputs had norm < C_bound
    within_bound: bool    # ratio < sqrt(3)


def vector_median_check(vectors: Sequence[np.ndarray],
                        c_bound: float) -> VectorMedianResult:
    """Coordinate-wise median norm vs the sqrt(3) bound."""
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("vectors must all have equal length")
    r = arr.shape[0]
    norms = np.linalg.norm(arr, axis=1)
    premise = int(np.sum(norms < c_bound)) >= math.ceil(3 * r / 4)
    med = np.median(arr, axis=0)
    ratio = float(np.linalg.norm(med) / c_bound)
    return VectorMedianResult(ratio, premise, ratio < math.sqrt(3.0))


@lru_cache(maxsize=8)
def block_partitions(n: int, block_size: int) -> np.ndarray:
    """All partitions of range(n) into blocks of block_size, as (P, l, k).

    Canonical order: the smallest unassigned element leads each block,
    so each unordered partition appears exactly once.
    """
    if n % block_size != 0:
        raise ValueError(f"block size {block_size} must divide {n}")
    out: list[tuple] = []

    def rec(remaining: tuple, acc: tuple):
        if not remaining:
            out.append(acc)
            return
        first, rest = remaining[0], remaining[1:]
        for combo in combinations(rest, block_size - 1):
            block = (first,) + combo
            left = tuple(e for e in rest if e not in combo)
            rec(left, acc + (block,))

    rec(tuple(range(n)), ())
    return np.array(out, dtype=np.int64)


class MedianCubedResult(NamedTuple):
    equal: bool
    partitions: int


def median_cubed_check(values: Sequence[float], block_size: int,
                       block_count: int) -> MedianCubedResult:
    """Median over all partitions of the median-of-block-medians vs the median.

    Exact equality; values must be distinct and the total count odd.
    """
    values = np.asarray(values, dtype=np.float64)
    n = len(values)
    if n != block_size * block_count or n % 2 == 0:
        raise ValueError(
            f"need an odd n = block_size * block_count, got n={n}, "
            f"k={block_size}, l={block_count}")
    if len(np.unique(values)) != n:
        raise ValueError("values must be distinct")
    parts = block_partitions(n, block_size)
    meds = kernels.partition_medians(values, parts)
    triple = float(np.median(meds))
    plain = float(np.median(values))
    return MedianCubedResult(triple == plain, len(parts))
