"""Decoding sketches back into coordinate estimates.

Count-Sketch decodes x_i as the median over rows of the sign-corrected
cell values; Count-Min takes the row minimum.  The block-median variant
splits the rows into g equal blocks, takes the median within each block
and then the median of the block medians.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .errors import PartitionError
from .sketch import COUNT_MIN, COUNT_SKETCH, SketchConfig, SketchTable

DIRECT_MEDIAN = "direct_median"
MEDIAN_OF_MEDIANS = "median_of_medians"


@dataclass(frozen=True)
class PartitionScheme:
    """Assignment of the R sketch rows to g equal blocks."""

    block_count: int
    assignment: tuple[int, ...]

    @classmethod
    def contiguous(cls, rows: int, block_count: int) -> "PartitionScheme":
        """Default scheme: row u goes to block floor(u*g/R)."""
        if block_count < 1 or rows % block_count != 0:
            raise PartitionError(
                f"block count {block_count} must divide row count {rows}")
        return cls(block_count,
                   tuple(u * block_count // rows for u in range(rows)))


@dataclass
class EstimateVector:
    """Estimates for every coordinate, with their provenance."""

    values: np.ndarray
    config: SketchConfig
    estimator: str = DIRECT_MEDIAN
    block_count: int = field(default=1)

    def __len__(self) -> int:
        return len(self.values)


def _row_values(table: SketchTable, items: np.ndarray) -> np.ndarray:
    return kernels.gather_values(table.cells, items, table.config.master_seed,
                                 table.signed)


def point_estimate(table: SketchTable, item: int) -> float:
    """Median over rows of s_u(i) * y_{u, h_u(i)}.

    Even row counts use the mean of the two central order statistics.
    """
    vals = _row_values(table, np.asarray([item], dtype=np.uint64))[:, 0]
    return float(np.median(vals))


def point_estimate_countmin(table: SketchTable, item: int) -> float:
    """Row minimum; never below x_i when the input is nonnegative."""
    vals = _row_values(table, np.asarray([item], dtype=np.uint64))[:, 0]
    return float(np.min(vals))


def estimate_items(table: SketchTable, items: np.ndarray) -> np.ndarray:
    """Vectorized estimates for a batch of item indices."""
    vals = _row_values(table, items)
    if table.config.kind == COUNT_MIN:
        return vals.min(axis=0)
    return np.median(vals, axis=0)


def estimate_vector(table: SketchTable, n: int) -> EstimateVector:
    """Estimates for every coordinate in [0, n)."""
    if n < 1:
        raise ValueError(f"domain size must be >= 1, got {n}")
    values = estimate_items(table, np.arange(n, dtype=np.uint64))
    return EstimateVector(values, table.config)


def median_of_medians_estimate(table: SketchTable, item: int,
                               scheme: PartitionScheme) -> float:
    """Median of per-block medians of the decoded row values."""
    cfg = table.config
    if len(scheme.assignment) != cfg.rows:
        raise PartitionError(
            f"scheme covers {len(scheme.assignment)} rows, table has {cfg.rows}")
    vals = _row_values(table, np.asarray([item], dtype=np.uint64))[:, 0]
    assignment = np.asarray(scheme.assignment)
    block_medians = [np.median(vals[assignment == b])
                     for b in range(scheme.block_count)]
    return float(np.median(block_medians))


def top_k_indices(estimates: EstimateVector | np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest magnitudes, ties going to smaller index.

    Output is sorted by decreasing magnitude, then increasing index.
    """
    values = estimates.values if isinstance(estimates, EstimateVector) else np.asarray(estimates)
    n = len(values)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    order = np.lexsort((np.arange(n), -np.abs(values)))
    return order[:k]
