"""Compare the numba kernels with the vectorized numpy fallback.

    python benchmarks/bench_backends.py [--repeat 5]

Both paths are timed in one process: the numba path through the compiled
kernels, the fallback through the batched numpy Jacobi that is selected when
OMPRIC_DISABLE_NUMBA=1. The interpreted loop kernel is shown for reference on
the smallest case only.
"""

import argparse
import time

import numpy as np

from ompric import numerics, rip
from ompric._accel import NUMBA_ENABLED, python_impl


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def unit_columns(rng, m, n):
    a = rng.standard_normal((m, n))
    return a / np.linalg.norm(a, axis=0)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not NUMBA_ENABLED:
        parser.error("numba is disabled or missing; nothing to compare against")

    rng = np.random.default_rng(0)
    rows = []

    for m, n, order in [(12, 18, 3), (12, 18, 4), (12, 18, 5), (16, 20, 6)]:
        a = unit_columns(rng, m, n)
        fast = best_of(lambda: rip.ric_exact(a, order, backend="numba"), args.repeat)
        slow = best_of(lambda: rip.ric_exact(a, order, backend="numpy"), args.repeat)
        rows.append((f"ric_exact {m}x{n} order {order}", fast, slow))

    for n in (4, 16, 48):
        b = rng.standard_normal((n, n))
        g = b + b.T
        tol = numerics.jacobi_tolerance(g)
        fast = best_of(lambda: numerics._jacobi_loop(g, tol, 100), args.repeat)
        slow = best_of(lambda: numerics._jacobi_batched(g[None], np.array([tol]), 100), args.repeat)
        rows.append((f"jacobi {n}x{n}", fast, slow))

    a = unit_columns(rng, 12, 18)
    interp = best_of(lambda: python_impl(rip._ric_scan_loop)(a.T @ a, 3, 1e-14, 100), 1)

    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  {'numba [ms]':>11}  {'numpy [ms]':>11}  {'ratio':>7}")
    for name, fast, slow in rows:
        print(f"{name:<{width}}  {fast * 1e3:>11.3f}  {slow * 1e3:>11.3f}  {slow / fast:>7.1f}")
    print(f"\ninterpreted loop kernel, ric_exact 12x18 order 3: {interp * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
