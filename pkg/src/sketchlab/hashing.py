"""Seeded counter-based hashing.

Each (master_seed, row, item) triple is mapped through a fixed 64-bit
mixing function to one pseudo-random word.  The top bit supplies the
sign and the low 63 bits (reduced mod C) supply the column, so sign and
column come from disjoint bits by construction.  Everything is a pure
function of its arguments: no tables, identical output on every
platform.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SketchConfigError

_MASK64 = (1 << 64) - 1
_MASK63 = (1 << 63) - 1

# splitmix64 constants (Steele/Lea/Flood mixer).
_GOLD = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
# Decorrelates rows before the final mix.
ROW_SALT = 0xD1342543DE82EF95


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixer on a 64-bit word."""
    z = (x + _GOLD) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class HashKey:
    """Addresses one hash evaluation: (master seed, row u, item i)."""

    master_seed: int
    row: int
    item: int


def prf64(master_seed: int, row: int, item: int) -> int:
    """The 64-bit pseudo-random word behind both hash functions."""
    z = splitmix64((item ^ (row * ROW_SALT)) & _MASK64)
    return splitmix64(z ^ (master_seed & _MASK64))


def hash_column(key: HashKey, num_columns: int) -> int:
    """Column h_u(i) in [0, num_columns).

    Uses the low 63 bits of the PRF word; the mod-C bias is at most
    C/2**63 and irrelevant for any supported C.
    """
    if num_columns < 1:
        raise SketchConfigError(f"num_columns must be >= 1, got {num_columns}")
    return (prf64(key.master_seed, key.row, key.item) & _MASK63) % num_columns


def hash_sign(key: HashKey) -> int:
    """Sign s_u(i) in {+1, -1}, taken from the PRF word's top bit."""
    return -1 if prf64(key.master_seed, key.row, key.item) >> 63 else 1


def derive_seed(master_seed: int, *parts: int) -> int:
    """Fold extra indices into a seed; used for per-trial sub-streams."""
    z = master_seed & _MASK64
    for p in parts:
        z = splitmix64(z ^ ((p * ROW_SALT) & _MASK64))
    return z
