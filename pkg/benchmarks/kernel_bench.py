#!/usr/bin/env python3
"""Benchmark the hot kernels: numba @njit vs the pure-numpy fallback.

Usage: python3 benchmarks/kernel_bench.py [--repeat N]

Covers the two kernels that dominate runtime in practice: the torus grid
scan (certification and Mahler quadrature) and the greedy separated-family
selection (packing bounds).  Both implementations are pulled directly from
algdyn._kernels so the benchmark measures exactly what the library runs.
"""

import argparse
import time

import numpy as np

from algdyn import _kernels


def time_call(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    variants = _kernels.backend_variants()
    have_numba = "numba" in variants["grid_abs_values"]
    print(f"active backend: {_kernels.BACKEND}   numba available: {have_numba}")
    print()

    cases = []

    # d=1, Mahler-scale grid
    exps1 = np.array([[-1], [0], [1]], dtype=np.int64)
    coefs1 = np.array([-1.0, 3.0, -1.0])
    cases.append(("grid_abs_values d=1 m=65536 (3 terms)", "grid_abs_values", (exps1, coefs1, 65536, 0.5)))

    # d=2, certification-scale grid
    f2 = [((0, 0), 5.0), ((1, 0), -1.0), ((-1, 0), -1.0), ((0, 1), -1.0), ((0, -1), -1.0)]
    exps2 = np.array([e for e, _ in f2], dtype=np.int64)
    coefs2 = np.array([c for _, c in f2])
    cases.append(("grid_abs_values d=2 m=512 (5 terms)", "grid_abs_values", (exps2, coefs2, 512, 0.0)))

    # greedy separation over a big synthetic family
    rng = np.random.default_rng(0)
    fam = rng.random((4096, 20))
    cases.append(("greedy_separated 4096x20 eps=0.3", "greedy_separated", (fam, 0.3)))
    fam2 = rng.random((20000, 8))
    cases.append(("greedy_separated 20000x8 eps=0.45", "greedy_separated", (fam2, 0.45)))

    header = f"{'case':45s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for label, kernel, call_args in cases:
        impls = variants[kernel]
        t_np = time_call(impls["numpy"], *call_args, repeat=args.repeat)
        if have_numba:
            impls["numba"](*call_args)  # compile outside the timer
            t_nb = time_call(impls["numba"], *call_args, repeat=args.repeat)
            ratio = t_np / t_nb if t_nb > 0 else float("inf")
            print(f"{label:45s} {t_np*1e3:9.2f}ms {t_nb*1e3:9.2f}ms {ratio:7.1f}x")
        else:
            print(f"{label:45s} {t_np*1e3:9.2f}ms {'-':>10s} {'-':>8s}")

    # agreement check so the table can be trusted
    if have_numba:
        a = variants["grid_abs_values"]["numpy"](exps2, coefs2, 128, 0.0)
        b = variants["grid_abs_values"]["numba"](exps2, coefs2, 128, 0.0)
        print(f"\nmax |numpy - numba| on d=2 grid: {np.max(np.abs(a - b)):.2e}")


if __name__ == "__main__":
    main()
