"""Brute-force reference implementations for tiny instances.

These exist to certify the closed forms and estimators; none of them
are meant to run at experiment scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import OracleBudgetError
from .estimators import top_k_indices


@dataclass(frozen=True)
class BruteForceBudget:
    max_states: int = 2_000_000
    grid_step: float = 1e-3

    def __post_init__(self):
        if self.max_states <= 0 or self.grid_step <= 0:
            raise ValueError("max_states and grid_step must be positive")


def oracle_median(values) -> float:
    """Full-sort median; even-length lists average the two middle values."""
    values = sorted(values)
    n = len(values)
    if n == 0:
        raise ValueError("median of empty list")
    mid = n // 2
    if n % 2:
        return float(values[mid])
    return (values[mid - 1] + values[mid]) / 2.0


def oracle_topk_error(x, xhat, k: int,
                      budget: BruteForceBudget = BruteForceBudget()) -> float:
    """Grid search for min ||x - x'|| over x' with the estimate's top-k.

    The selected coordinates are pinned to the estimated values.  Each
    unselected coordinate is swept independently over a grid on
    [-m*, m*] plus the exact clamp candidates; the per-coordinate minima
    are independent, so the search is a 1-d sweep per coordinate.
    """
    x = np.asarray(x, dtype=np.float64)
    xhat = np.asarray(xhat, dtype=np.float64)
    n = len(x)
    if n > 6 or k > 3:
        raise OracleBudgetError(f"oracle limited to n <= 6, k <= 3, got n={n}, k={k}")
    top = top_k_indices(xhat, k)
    m_star = float(np.abs(xhat[top]).min())
    selected = set(int(i) for i in top)

    grid_points = int(2 * m_star / budget.grid_step) + 1
    if grid_points * (n - k) > budget.max_states:
        raise OracleBudgetError(
            f"grid of {grid_points} points x {n - k} coordinates exceeds budget")
    grid = np.linspace(-m_star, m_star, max(grid_points, 2))

    total_sq = 0.0
    for i in range(n):
        if i in selected:
            total_sq += (x[i] - xhat[i]) ** 2
        else:
            candidates = np.append(grid, [m_star, -m_star,
                                          np.clip(x[i], -m_star, m_star)])
            total_sq += float(np.min((x[i] - candidates) ** 2))
    return float(np.sqrt(total_sq))


def oracle_sketch_distribution(x, rows: int, columns: int,
                               budget: BruteForceBudget = BruteForceBudget(),
                               item: int = 0):
    """Exact law of the Count-Sketch estimate of x[item].

    Enumerates every (h, s) assignment per row uniformly; rows are
    i.i.d., so the median law comes from enumerating row-value tuples.
    Returns (values, probabilities) sorted by value.
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n > 4 or rows > 3:
        raise OracleBudgetError(f"oracle limited to n <= 4, R <= 3, got n={n}, R={rows}")
    per_row = (columns ** n) * (2 ** n)
    if per_row > budget.max_states:
        raise OracleBudgetError(f"{per_row} per-row assignments exceed budget")

    # Law of one row's decoded value s(i) * y_{h(i)}.
    row_law: dict[float, float] = {}
    weight = 1.0 / per_row
    for cols in product(range(columns), repeat=n):
        for signs in product((1.0, -1.0), repeat=n):
            val = sum(signs[j] * x[j] for j in range(n)
                      if cols[j] == cols[item])
            val *= signs[item]
            row_law[val] = row_law.get(val, 0.0) + weight

    vals = sorted(row_law)
    # Median over `rows` i.i.d. draws from the row law.
    law: dict[float, float] = {}
    for combo in product(vals, repeat=rows):
        pr = 1.0
        for v in combo:
            pr *= row_law[v]
        med = oracle_median(combo)
        law[med] = law.get(med, 0.0) + pr
    support = np.array(sorted(law))
    probs = np.array([law[v] for v in support])
    return support, probs
