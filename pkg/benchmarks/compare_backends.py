"""Time the numba kernels against the pure-numpy fallback.

Runs the same minimum-distance searches and addition workloads through both
backends, checks that they agree, and prints one row per case::

    python benchmarks/compare_backends.py [--quick]
"""

from __future__ import annotations

import argparse
import time

from slicedgf import bench, kernels
from slicedgf.code import random_code
from slicedgf.engine import EngineOptions, minimum_weight

SEARCH_CASES = [
    # p, k, n, seed
    (3, 20, 40, 1),
    (7, 10, 40, 4),
    (11, 7, 30, 3),
]
ADD_CASES = [(3, "sliced64"), (7, "sliced64"), (3, "contig8mod"), (7, "contig32")]


def _time(fn):
    start = time.perf_counter()
    out = fn()
    return time.perf_counter() - start, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args(argv)
    if kernels.JIT.enumerate_items is None:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'case':<34}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for p, k, n, seed in SEARCH_CASES[:2] if args.quick else SEARCH_CASES:
        G = random_code(p, k, n, seed)
        minimum_weight(G, EngineOptions(backend="numba"))  # compile
        t_jit, (d_jit, _) = _time(lambda: minimum_weight(G, EngineOptions(backend="numba")))
        t_np, (d_np, _) = _time(lambda: minimum_weight(G, EngineOptions(backend="numpy")))
        assert d_jit == d_np, (p, k, n, d_jit, d_np)
        print(f"{f'mindist p={p} k={k} n={n} d={d_jit}':<34}{t_jit:>10.3f}{t_np:>10.3f}{t_np / t_jit:>8.1f}x")

    vectors, reps = (1000, 20) if args.quick else (10_000, 100)
    for p, method in ADD_CASES:
        bench.warm_up(p, method, "numba")
        r_jit = bench.run(p, method, 512, vectors, reps, backend="numba")
        r_np = bench.run(p, method, 512, vectors, reps, backend="numpy")
        assert r_jit.checksum == r_np.checksum
        label = f"add {method} p={p} x{vectors}x{reps}"
        print(f"{label:<34}{r_jit.seconds:>10.3f}{r_np.seconds:>10.3f}{r_np.seconds / max(r_jit.seconds, 1e-9):>8.1f}x")


if __name__ == "__main__":
    main()
