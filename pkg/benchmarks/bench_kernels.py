#!/usr/bin/env python3
"""Benchmark the jit-compiled kernels against the pure-numpy fallbacks.

Run as:  python3 benchmarks/bench_kernels.py [--rows N] [--repeat R]

Times both code paths on the same synthetic arrays and prints a table.
The jit path requires numba; unset FAIRAUDIT_NO_NUMBA to enable it.
"""

import argparse
import statistics
import time

import numpy as np

from fairaudit import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times), statistics.median(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=2_000_000)
    parser.add_argument("--groups", type=int, default=64)
    parser.add_argument("--bins", type=int, default=64)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not kernels.NUMBA_ENABLED:
        parser.error(
            "numba path is disabled (FAIRAUDIT_NO_NUMBA set or numba missing); "
            "nothing to compare"
        )

    rng = np.random.default_rng(0)
    n, g, b = args.rows, args.groups, args.bins
    gid = rng.integers(-1, g, n).astype(np.int64)
    pred = rng.integers(-1, 2, n).astype(np.int8)
    true = rng.integers(-1, 2, n).astype(np.int8)
    classes = rng.integers(-1, 8, n).astype(np.int64)
    values = rng.normal(0, 1, n)
    edges = np.linspace(-4, 4, b + 1)
    raw = rng.random((g, b)) + 1e-9
    probs = raw / raw.sum(axis=1, keepdims=True)

    cases = [
        (
            "group_binary_counts",
            lambda: kernels.group_binary_counts(gid, g, pred, true),
            lambda: kernels.group_binary_counts_numpy(gid, g, pred, true),
        ),
        (
            "group_class_counts",
            lambda: kernels.group_class_counts(gid, g, classes, 8),
            lambda: kernels.group_class_counts_numpy(gid, g, classes, 8),
        ),
        (
            "histogram_counts",
            lambda: kernels.histogram_counts(values, edges),
            lambda: kernels.histogram_counts_numpy(values, edges),
        ),
        (
            "pairwise_divergence_matrix",
            lambda: kernels.pairwise_divergence_matrix(probs, kernels.DIV_KL),
            lambda: kernels.pairwise_divergence_matrix_numpy(probs, kernels.DIV_KL),
        ),
    ]

    kernels.warmup()
    print(f"rows={n:,} groups={g} bins={b} repeat={args.repeat} (best times)")
    print(f"{'kernel':<28} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, fast, slow in cases:
        fast()  # compile on these argument types before timing
        t_fast, _ = best_of(fast, args.repeat)
        t_slow, _ = best_of(slow, args.repeat)
        print(
            f"{name:<28} {t_fast * 1e3:>8.2f}ms {t_slow * 1e3:>8.2f}ms "
            f"{t_slow / t_fast:>7.1f}x"
        )


if __name__ == "__main__":
    main()
