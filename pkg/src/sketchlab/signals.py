"""Test-signal generators and tail statistics.

The Pareto generator uses the scale mu = n**(-1/alpha) * sqrt(2/alpha - 1),
which puts the expected squared tail norm beyond the top k entries near
k**(1 - 2/alpha) for k >= 10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

PARETO = "pareto"
POWER_LAW = "power_law"
LOGNORMAL = "lognormal"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class SignalSpec:
    """Recipe for one test vector."""

    kind: str
    n: int
    alpha: Optional[float] = None
    sigma_log: Optional[float] = None
    values: Optional[tuple] = None
    seed: int = 0

    def generate(self, seed: Optional[int] = None) -> np.ndarray:
        s = self.seed if seed is None else seed
        if self.kind == PARETO:
            return generate_pareto(self.n, self.alpha, s)
        if self.kind == POWER_LAW:
            return generate_power_law(self.n, self.alpha)
        if self.kind == LOGNORMAL:
            return generate_lognormal(self.n, self.sigma_log, s)
        if self.kind == EXPLICIT:
            return np.asarray(self.values, dtype=np.float64)
        raise ValueError(f"unknown signal kind {self.kind!r}")


class TailStats(NamedTuple):
    k: int
    tail_norm_sq: float
    head_gap: float


class DecayRatio(NamedTuple):
    ratio: float
    exactly_sparse: bool


def pareto_scale(n: int, alpha: float) -> float:
    """Scale parameter mu = n**(-1/alpha) * sqrt(2/alpha - 1)."""
    if alpha <= 0.5:
        raise ValueError(f"pareto alpha must exceed 0.5, got {alpha}")
    return n ** (-1.0 / alpha) * math.sqrt(2.0 / alpha - 1.0)


def generate_pareto(n: int, alpha: float, seed: int = 0) -> np.ndarray:
    """I.i.d. Pareto (Type I) entries: Pr[x_i > t] = (mu/t)**alpha.

    Inverse-CDF sampling, x = mu * U**(-1/alpha) with U in (0, 1].
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    mu = pareto_scale(n, alpha)
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)  # (0, 1], keeps values finite
    return mu * u ** (-1.0 / alpha)


def generate_power_law(n: int, alpha: float) -> np.ndarray:
    """Deterministic x_i = i**(-alpha) for i = 1..n."""
    if alpha <= 0:
        raise ValueError(f"power-law alpha must be positive, got {alpha}")
    return np.arange(1, n + 1, dtype=np.float64) ** (-alpha)


def generate_lognormal(n: int, sigma_log: float, seed: int = 0) -> np.ndarray:
    """I.i.d. exp(sigma_log * Z) with Z standard normal."""
    if sigma_log <= 0:
        raise ValueError(f"sigma_log must be positive, got {sigma_log}")
    rng = np.random.default_rng(seed)
    return np.exp(sigma_log * rng.standard_normal(n))


def _sorted_magnitudes(x: np.ndarray) -> np.ndarray:
    # decreasing |x|, ties broken by smaller index first
    a = np.abs(np.asarray(x, dtype=np.float64))
    order = np.lexsort((np.arange(len(a)), -a))
    return a[order]


def tail_stats(x: np.ndarray, k: int) -> TailStats:
    """Squared tail norm past the k largest magnitudes, and |x_(k)| - |x_(2k)|."""
    x = np.asarray(x, dtype=np.float64)
    if k < 1 or 2 * k > len(x):
        raise ValueError(f"need 1 <= 2k <= n, got k={k}, n={len(x)}")
    mags = _sorted_magnitudes(x)
    tail_norm_sq = float(np.sum(mags[k:] ** 2))
    head_gap = float(mags[k - 1] - mags[2 * k - 1])
    return TailStats(k, tail_norm_sq, head_gap)


def tail_norm_sq(x: np.ndarray, k: int) -> float:
    """Sum of squares of all but the k largest magnitudes (k=0 allowed)."""
    mags = _sorted_magnitudes(x)
    return float(np.sum(mags[k:] ** 2))


def decay_condition_ratio(x: np.ndarray, k: int) -> DecayRatio:
    """head_gap / (tail_norm / sqrt(k)); +inf when the tail is exactly zero."""
    stats = tail_stats(x, k)
    if stats.tail_norm_sq == 0.0:
        return DecayRatio(math.inf, True)
    return DecayRatio(stats.head_gap / math.sqrt(stats.tail_norm_sq / k), False)


def save_vector(path, x: Sequence[float]) -> None:
    """One ASCII decimal per line, round-trippable for float64."""
    with open(path, "w") as fh:
        for v in x:
            fh.write(f"{v:.17g}\n")


def load_vector(path) -> np.ndarray:
    with open(path) as fh:
        return np.array([float(line) for line in fh if line.strip()],
                        dtype=np.float64)
