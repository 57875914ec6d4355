"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--sizes 100 200 400]

Prints one CSV row per (kernel, size, backend) with the best wall time of
``--repeat`` runs and the speedup of the compiled backend.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from maskfree._kernels import _fallback

try:
    from maskfree._kernels import _core
except ImportError:
    _core = None

from maskfree.combinat import PairPartition
from maskfree.masks import band_removed, weight_layout


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def eig_job(mod, M):
    def go():
        n = M.shape[0]
        V, d, e = M.copy(), np.zeros(n), np.zeros(n)
        mod.tred2(V, d, e)
        mod.tql2(d, e, V, False)
    return go


def weight_job(mod, n):
    D = band_removed(n, 1)
    rows, cols, sizes = weight_layout(PairPartition.parse("(1,2)(3,4)(5,6)"), n, n, False)
    return lambda: mod.orbit_weight_count(D.entries, rows, cols, sizes)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--weight-sizes", type=int, nargs="+", default=[32, 64, 128])
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled extension not available; build with pip install -e .", file=sys.stderr)
        return 1
    print("kernel,size,python_s,cython_s,speedup")
    rng = np.random.default_rng(0)
    for n in args.sizes:
        A = rng.standard_normal((n, n))
        M = (A + A.T) / 2
        py = best_of(eig_job(_fallback, M), args.repeat)
        cy = best_of(eig_job(_core, M), args.repeat)
        print(f"eigenvalues,{n},{py:.4f},{cy:.4f},{py / cy:.1f}")
    for n in args.weight_sizes:
        py = best_of(weight_job(_fallback, n), args.repeat)
        cy = best_of(weight_job(_core, n), args.repeat)
        print(f"partition_weight_k3,{n},{py:.4f},{cy:.4f},{py / cy:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
