"""Time the series kernels on the numba and numpy paths.

    python benchmarks/bench_kernels.py [--length 6] [--repeat 5]

Both paths are timed in-process; the numba path is warmed up first so the
timings exclude compilation. The backend flag only matters at import, so
the dispatch functions are called with an explicit ``use_numba``.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from chbergman import BallPoint, enumerate_orbit
from chbergman._accel import HAVE_NUMBA
from chbergman._kernels import diag_terms, offdiag_terms, pairwise_sum
from chbergman.presets import schottky_spec


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=7)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--m", type=int, default=30)
    args = ap.parse_args()

    z = BallPoint(0.21 + 0.1j, -0.17 + 0.05j)
    w = BallPoint(-0.3j, 0.12)
    orb = enumerate_orbit(schottky_spec(), z, z, args.length)
    mats = orb.matrices
    zv, wv = z.as_array(), w.as_array()
    print(f"orbit elements: {len(mats)}, weight m = {args.m}")

    cases = {
        "offdiag_terms": lambda nb: offdiag_terms(mats, zv, wv, args.m, use_numba=nb),
        "diag_terms+derivs": lambda nb: diag_terms(mats, zv, args.m, use_numba=nb),
        "pairwise_sum": lambda nb: pairwise_sum(offdiag_terms(mats, zv, wv, args.m), use_numba=nb),
    }
    paths = [False] + ([True] if HAVE_NUMBA else [])
    print(f"{'kernel':<20}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>10}")
    for name, fn in cases.items():
        res = {}
        for nb in paths:
            fn(nb)
            res[nb] = best_of(lambda: fn(nb), args.repeat) * 1e3
        if True in res:
            a, b = fn(False), fn(True)
            a = a if isinstance(a, tuple) else (a,)
            b = b if isinstance(b, tuple) else (b,)
            diff = max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))
            print(f"{name:<20}{res[False]:>12.3f}{res[True]:>12.3f}{res[False] / res[True]:>9.1f}x"
                  f"   max |diff| {diff:.2e}")
        else:
            print(f"{name:<20}{res[False]:>12.3f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
