"""Pure-numpy implementations of the hot kernels.

Same arithmetic as `hashing.prf64`, vectorized.  All uint64 math relies
on numpy's wrapping semantics; constants must stay np.uint64 so numpy
never promotes to float.
"""

from __future__ import annotations

import numpy as np

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_ROW_SALT = np.uint64(0xD1342543DE82EF95)
_MASK63 = np.uint64((1 << 63) - 1)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S63 = np.uint64(63)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + _GOLD
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def prf_flat(seed: np.ndarray, row: np.ndarray, item: np.ndarray) -> np.ndarray:
    """Elementwise PRF over equal-length uint64 arrays."""
    z = _splitmix64(item ^ (row * _ROW_SALT))
    return _splitmix64(z ^ seed)


def _row_words(seed: int, row: int, items: np.ndarray) -> np.ndarray:
    # fold the row salt in python ints to avoid scalar-overflow warnings
    salted = np.uint64((row * 0xD1342543DE82EF95) & ((1 << 64) - 1))
    z = _splitmix64(items ^ salted)
    return _splitmix64(z ^ np.uint64(seed))


def columns_signs(seed: int, row: int, items: np.ndarray, num_columns: int):
    """Columns (int64) and signs (float64 +-1) for one row of the sketch."""
    w = _row_words(seed, row, items)
    cols = ((w & _MASK63) % np.uint64(num_columns)).astype(np.int64)
    signs = 1.0 - 2.0 * (w >> _S63).astype(np.float64)
    return cols, signs


def build_table(x: np.ndarray, rows: int, num_columns: int, seed: int,
                signed: bool) -> np.ndarray:
    """Accumulate a full vector into an R x C table in one pass per row."""
    items = np.arange(len(x), dtype=np.uint64)
    cells = np.empty((rows, num_columns), dtype=np.float64)
    for u in range(rows):
        cols, signs = columns_signs(seed, u, items, num_columns)
        w = signs * x if signed else x
        cells[u] = np.bincount(cols, weights=w, minlength=num_columns)
    return cells


def gather_values(cells: np.ndarray, items: np.ndarray, seed: int,
                  signed: bool) -> np.ndarray:
    """Per-row decoded values for the given items: s_u(i)*y or plain y."""
    rows, num_columns = cells.shape
    items = np.asarray(items, dtype=np.uint64)
    out = np.empty((rows, len(items)), dtype=np.float64)
    for u in range(rows):
        cols, signs = columns_signs(seed, u, items, num_columns)
        vals = cells[u, cols]
        out[u] = signs * vals if signed else vals
    return out


def partition_medians(values: np.ndarray, parts: np.ndarray) -> np.ndarray:
    """Median over blocks of within-block medians, per partition.

    values: (n,) floats; parts: (P, l, k) index array with k odd.
    """
    a = values[parts]
    # odd-length medians are exact order statistics, no averaging
    return np.median(np.median(a, axis=2), axis=1)
