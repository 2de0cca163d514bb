"""Kernel backend selection.

Set SKETCHLAB_BACKEND=numpy to force the pure-numpy kernels (no JIT),
SKETCHLAB_BACKEND=numba to require numba, or leave unset/auto to use
numba when importable.  Both backends produce bit-identical results;
see benchmarks/bench_backends.py for the speed comparison.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_CHOICE = os.environ.get("SKETCHLAB_BACKEND", "auto").lower()

if _CHOICE not in ("auto", "numba", "numpy"):
    raise ValueError(f"SKETCHLAB_BACKEND must be auto|numba|numpy, got {_CHOICE!r}")

if _CHOICE == "numpy":
    kernels = _kernels_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba

        kernels = _kernels_numba
        BACKEND = "numba"
    except ImportError:
        if _CHOICE == "numba":
            raise
        kernels = _kernels_numpy
        BACKEND = "numpy"


def active_backend() -> str:
    return BACKEND
