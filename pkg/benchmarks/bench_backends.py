"""Timing comparison of the numba and pure-numpy kernel backends.

Run as a script:  python3 benchmarks/bench_backends.py [--n 1000000]

Imports both kernel modules directly (ignoring SKETCHLAB_BACKEND) so a
single run covers both; the first numba call includes JIT compilation
and is timed separately.
"""

import argparse
import time

import numpy as np

from sketchlab import _kernels_numpy
from sketchlab.concentration import block_partitions

try:
    from sketchlab import _kernels_numba
except ImportError:
    _kernels_numba = None


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=1_000_000)
    parser.add_argument("--rows", type=int, default=26)
    parser.add_argument("--cols", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    x = rng.pareto(1.25, args.n) + 1.0
    items = rng.integers(0, args.n, 10_000).astype(np.uint64)
    parts = block_partitions(15, 3)
    med_vals = rng.standard_normal(15)

    backends = {"numpy": _kernels_numpy}
    if _kernels_numba is not None:
        t0 = time.perf_counter()
        _kernels_numba.build_table(x[:100], 2, 8, 0, True)
        _kernels_numba.gather_values(np.zeros((2, 8)), items[:4], 0, True)
        _kernels_numba.partition_medians(med_vals, parts[:2])
        print(f"numba JIT warmup: {time.perf_counter() - t0:.2f}s")
        backends["numba"] = _kernels_numba
    else:
        print("numba not importable; benchmarking numpy only")

    tasks = {
        f"build_table n={args.n} R={args.rows} C={args.cols}":
            lambda k: k.build_table(x, args.rows, args.cols, args.seed, True),
        f"gather_values 10k items R={args.rows}":
            lambda k: k.gather_values(np.zeros((args.rows, args.cols)),
                                      items, args.seed, True),
        f"partition_medians {len(parts)} partitions of 15":
            lambda k: k.partition_medians(med_vals, parts),
    }

    cells = {}
    for label, task in tasks.items():
        print(f"\n{label}")
        for name, mod in backends.items():
            secs = _time(lambda: task(mod))
            print(f"  {name:6s} {secs * 1e3:8.2f} ms")
        if len(backends) == 2:
            a = tasks[label](backends["numpy"])
            b = tasks[label](backends["numba"])
            match = np.array_equal(np.asarray(a), np.asarray(b))
            print(f"  bit-identical outputs: {match}")
            cells[label] = match

    if cells and not all(cells.values()):
        raise SystemExit("backend outputs diverged")


if __name__ == "__main__":
    main()
