"""Numba-compiled implementations of the hot kernels.

Bit-for-bit identical to `_kernels_numpy`; the fused loops avoid the
intermediate arrays and the bincount/gather passes.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_GOLD = uint64(0x9E3779B97F4A7C15)
_MIX1 = uint64(0xBF58476D1CE4E5B9)
_MIX2 = uint64(0x94D049BB133111EB)
_ROW_SALT = uint64(0xD1342543DE82EF95)
_MASK63 = uint64((1 << 63) - 1)


@njit(cache=True, inline="always")
def _splitmix64(z):
    z = uint64(z + _GOLD)
    z = uint64(uint64(z ^ uint64(z >> uint64(30))) * _MIX1)
    z = uint64(uint64(z ^ uint64(z >> uint64(27))) * _MIX2)
    return uint64(z ^ uint64(z >> uint64(31)))


@njit(cache=True, inline="always")
def _prf(seed, row, item):
    z = _splitmix64(uint64(item ^ uint64(row * _ROW_SALT)))
    return _splitmix64(uint64(z ^ seed))


@njit(cache=True)
def prf_flat(seed, row, item):
    out = np.empty(len(item), dtype=np.uint64)
    for j in range(len(item)):
        out[j] = _prf(seed[j], row[j], item[j])
    return out


@njit(cache=True)
def _columns_signs(seed, row, items, num_columns):
    n = len(items)
    cols = np.empty(n, dtype=np.int64)
    signs = np.empty(n, dtype=np.float64)
    s = uint64(seed)
    r = uint64(row)
    c = uint64(num_columns)
    for j in range(n):
        w = _prf(s, r, items[j])
        cols[j] = np.int64(uint64(w & _MASK63) % c)
        signs[j] = -1.0 if (w >> uint64(63)) else 1.0
    return cols, signs


def columns_signs(seed: int, row: int, items: np.ndarray, num_columns: int):
    return _columns_signs(np.uint64(seed), np.uint64(row),
                          np.asarray(items, dtype=np.uint64), num_columns)


@njit(cache=True)
def _build_table(x, rows, num_columns, seed, signed):
    cells = np.zeros((rows, num_columns), dtype=np.float64)
    s = uint64(seed)
    c = uint64(num_columns)
    for u in range(rows):
        r = uint64(u)
        for i in range(len(x)):
            w = _prf(s, r, uint64(i))
            col = np.int64(uint64(w & _MASK63) % c)
            if signed and (w >> uint64(63)):
                cells[u, col] -= x[i]
            else:
                cells[u, col] += x[i]
    return cells


def build_table(x: np.ndarray, rows: int, num_columns: int, seed: int,
                signed: bool) -> np.ndarray:
    return _build_table(np.asarray(x, dtype=np.float64), rows, num_columns,
                        np.uint64(seed), signed)


@njit(cache=True)
def _gather_values(cells, items, seed, signed):
    rows, num_columns = cells.shape
    out = np.empty((rows, len(items)), dtype=np.float64)
    s = uint64(seed)
    c = uint64(num_columns)
    for u in range(rows):
        r = uint64(u)
        for j in range(len(items)):
            w = _prf(s, r, items[j])
            col = np.int64(uint64(w & _MASK63) % c)
            v = cells[u, col]
            if signed and (w >> uint64(63)):
                v = -v
            out[u, j] = v
    return out


def gather_values(cells: np.ndarray, items: np.ndarray, seed: int,
                  signed: bool) -> np.ndarray:
    return _gather_values(cells, np.asarray(items, dtype=np.uint64),
                          np.uint64(seed), signed)


@njit(cache=True, inline="always")
def _median_small(buf, m):
    # insertion sort; m is odd and tiny
    for i in range(1, m):
        v = buf[i]
        j = i - 1
        while j >= 0 and buf[j] > v:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = v
    return buf[m // 2]


@njit(cache=True)
def _partition_medians(values, parts):
    num_parts, num_blocks, block_size = parts.shape
    out = np.empty(num_parts, dtype=np.float64)
    block_buf = np.empty(block_size, dtype=np.float64)
    med_buf = np.empty(num_blocks, dtype=np.float64)
    for p in range(num_parts):
        for b in range(num_blocks):
            for i in range(block_size):
                block_buf[i] = values[parts[p, b, i]]
            med_buf[b] = _median_small(block_buf, block_size)
        out[p] = _median_small(med_buf, num_blocks)
    return out


def partition_medians(values: np.ndarray, parts: np.ndarray) -> np.ndarray:
    return _partition_medians(np.asarray(values, dtype=np.float64),
                              np.ascontiguousarray(parts, dtype=np.int64))
