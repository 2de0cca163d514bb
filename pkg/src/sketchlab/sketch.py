"""Linear sketch tables: Count-Sketch and Count-Min.

A table is an R x C array of float64 accumulators plus its
configuration.  Count-Sketch cells hold signed sums of colliding
coordinates; Count-Min cells hold unsigned sums.  Both are linear in
the input, so tables with equal configurations can be merged cell-wise.

Wire format (little-endian): magic b"CSK1", kind byte (0=count_sketch,
1=count_min), R as u32, C as u32, master_seed as u64, then R*C cells as
IEEE-754 doubles in row-major order.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import (DeserializationError, SketchCompatibilityError,
                     SketchConfigError)
from .hashing import HashKey, hash_column, hash_sign

COUNT_SKETCH = "count_sketch"
COUNT_MIN = "count_min"

_MAGIC = b"CSK1"
_KIND_BYTE = {COUNT_SKETCH: 0, COUNT_MIN: 1}
_BYTE_KIND = {v: k for k, v in _KIND_BYTE.items()}
_HEADER = struct.Struct("<4sBIIQ")


@dataclass(frozen=True)
class SketchConfig:
    """Dimensions and seed; two tables merge iff their configs are equal."""

    rows: int
    columns: int
    master_seed: int = 0
    kind: str = COUNT_SKETCH

    def __post_init__(self):
        if self.rows < 1 or self.columns < 1:
            raise SketchConfigError(
                f"rows and columns must be >= 1, got ({self.rows}, {self.columns})")
        if self.kind not in _KIND_BYTE:
            raise SketchConfigError(f"unknown sketch kind {self.kind!r}")
        if not 0 <= self.master_seed < 2**64:
            raise SketchConfigError("master_seed must fit in 64 bits")


class SketchTable:
    """Mutable accumulator table for either sketch kind."""

    def __init__(self, config: SketchConfig, cells: np.ndarray | None = None):
        if cells is None:
            cells = np.zeros((config.rows, config.columns), dtype=np.float64)
        else:
            cells = np.asarray(cells, dtype=np.float64)
            if cells.shape != (config.rows, config.columns):
                raise SketchConfigError(
                    f"cells shape {cells.shape} does not match config "
                    f"({config.rows}, {config.columns})")
        self.config = config
        self.cells = cells

    @property
    def signed(self) -> bool:
        return self.config.kind == COUNT_SKETCH

    def update(self, item: int, delta: float) -> "SketchTable":
        """Apply one streaming update (item, delta); touches R cells."""
        if not math.isfinite(delta):
            raise ValueError(f"update delta must be finite, got {delta}")
        if delta == 0.0:
            return self
        cfg = self.config
        for u in range(cfg.rows):
            key = HashKey(cfg.master_seed, u, item)
            col = hash_column(key, cfg.columns)
            if self.signed:
                self.cells[u, col] += hash_sign(key) * delta
            else:
                self.cells[u, col] += delta
        return self

    @classmethod
    def from_vector(cls, config: SketchConfig, x: np.ndarray) -> "SketchTable":
        """Sketch a whole vector; equal to folding update over (i, x_i)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or len(x) < 1:
            raise ValueError("input must be a nonempty 1-d vector")
        if not np.all(np.isfinite(x)):
            raise ValueError("input vector contains non-finite entries")
        signed = config.kind == COUNT_SKETCH
        cells = kernels.build_table(x, config.rows, config.columns,
                                    config.master_seed, signed)
        return cls(config, cells)

    def merge(self, other: "SketchTable") -> "SketchTable":
        """Cell-wise sum; both tables must share one configuration."""
        if self.config != other.config:
            raise SketchCompatibilityError(
                f"cannot merge sketches with configs {self.config} and {other.config}")
        return SketchTable(self.config, self.cells + other.cells)

    def to_bytes(self) -> bytes:
        cfg = self.config
        header = _HEADER.pack(_MAGIC, _KIND_BYTE[cfg.kind], cfg.rows,
                              cfg.columns, cfg.master_seed)
        return header + self.cells.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SketchTable":
        if len(data) < _HEADER.size:
            raise DeserializationError(
                f"truncated header: need {_HEADER.size} bytes, got {len(data)}")
        magic, kind_byte, rows, columns, seed = _HEADER.unpack_from(data, 0)
        if magic != _MAGIC:
            raise DeserializationError(f"bad magic {magic!r} at offset 0")
        if kind_byte not in _BYTE_KIND:
            raise DeserializationError(f"unknown kind byte {kind_byte} at offset 4")
        if rows < 1 or columns < 1:
            raise DeserializationError(f"invalid dimensions ({rows}, {columns}) at offset 5")
        expect = _HEADER.size + rows * columns * 8
        if len(data) != expect:
            raise DeserializationError(
                f"truncated cells at offset {len(data)}: expected {expect} bytes total")
        cells = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(
            rows, columns).copy()
        config = SketchConfig(rows, columns, seed, _BYTE_KIND[kind_byte])
        return cls(config, cells)


def new_table(config: SketchConfig) -> SketchTable:
    return SketchTable(config)


def sketch_vector(config: SketchConfig, x: np.ndarray) -> SketchTable:
    return SketchTable.from_vector(config, x)
