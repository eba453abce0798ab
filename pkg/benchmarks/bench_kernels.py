#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Run after building the extension (pip install -e . --no-build-isolation):

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from cwemap._kernels import _pure

try:
    from cwemap._kernels import _native
except ImportError:
    _native = None


def timeit(fn, *args, repeat=5, inner=20):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_bm25(rng):
    print("\nbm25_scores: 25 docs, varying query width")
    print(f"{'terms':>6} {'pure (us)':>12} {'native (us)':>12} {'speedup':>8}")
    for n_terms in (8, 32, 128, 512):
        tf = rng.integers(0, 6, size=(25, n_terms)).astype(np.float64)
        qtf = rng.integers(1, 4, size=n_terms).astype(np.float64)
        idf = rng.uniform(0.1, 3.0, size=n_terms)
        dlnorm = rng.uniform(0.3, 2.5, size=25)
        t_pure = timeit(_pure.bm25_scores, tf, qtf, idf, dlnorm, 1.2)
        if _native is None:
            print(f"{n_terms:>6} {t_pure * 1e6:>12.2f} {'-':>12} {'-':>8}")
            continue
        t_nat = timeit(_native.bm25_scores, tf, qtf, idf, dlnorm, 1.2)
        print(f"{n_terms:>6} {t_pure * 1e6:>12.2f} {t_nat * 1e6:>12.2f} "
              f"{t_pure / t_nat:>8.2f}x")


def bench_cosine(rng):
    print("\nmax_cosine: CVE sentences x CWE sentences, dim 384")
    print(f"{'pairs':>10} {'pure (us)':>12} {'native (us)':>12} {'speedup':>8}")
    for n, m in ((4, 8), (6, 12), (12, 32), (32, 64)):
        a = rng.normal(size=(n, 384))
        b = rng.normal(size=(m, 384))
        t_pure = timeit(_pure.max_cosine, a, b)
        if _native is None:
            print(f"{n}x{m:>7} {t_pure * 1e6:>12.2f} {'-':>12} {'-':>8}")
            continue
        t_nat = timeit(_native.max_cosine, a, b)
        print(f"{f'{n}x{m}':>10} {t_pure * 1e6:>12.2f} {t_nat * 1e6:>12.2f} "
              f"{t_pure / t_nat:>8.2f}x")


def main():
    print(f"native extension available: {_native is not None}")
    rng = np.random.default_rng(0)
    bench_bm25(rng)
    bench_cosine(rng)


if __name__ == "__main__":
    main()
