"""Compare the compiled kernels with their numpy / pure-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 4000]

The first compiled call is made before timing so JIT cost is excluded.
"""
import argparse
import time

import numpy as np

from qshelf import _kernels as K


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=4000, help="series length for convolution and division")
    ap.add_argument("--n-max", type=int, default=60, help="largest n for the partition search")
    args = ap.parse_args()
    if K.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    n = args.size
    a = rng.integers(-50, 50, n).astype(np.int64)
    b = rng.integers(-50, 50, n).astype(np.int64)
    # 1 - q^7 - q^11 + q^18: the quotient grows only polynomially, so neither
    # path bails out early
    unit = np.zeros(19, dtype=np.int64)
    unit[[0, 7, 11, 18]] = [1, -1, -1, 1]
    ok, _ = K.unit_divide_numpy(a, unit, n, K.SAFE_LIMIT // 2)
    assert ok
    search = (args.n_max, 3, 1, args.n_max, 2, -1, 0)

    cases = [
        ("convolve", lambda: K._convolve_nb(a, b, n), lambda: K.convolve_trunc_numpy(a, b, n)),
        ("unit_divide", lambda: K._unit_divide_nb(a, unit, n, K.SAFE_LIMIT // 2),
         lambda: K.unit_divide_numpy(a, unit, n, K.SAFE_LIMIT // 2)),
        ("partition search", lambda: K._count_restricted_nb(*search, np.zeros(args.n_max + 1, dtype=np.int64)),
         lambda: K.count_restricted_loop(*search, np.zeros(args.n_max + 1, dtype=np.int64))),
    ]
    print(f"{'kernel':<18}{'numba [s]':>12}{'fallback [s]':>14}{'speedup':>10}")
    for name, fast, slow in cases:
        fast()
        tf = best_of(fast, args.repeat)
        ts = best_of(slow, args.repeat)
        print(f"{name:<18}{tf:>12.5f}{ts:>14.5f}{ts / tf:>9.1f}x")


if __name__ == "__main__":
    main()
