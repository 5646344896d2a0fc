#!/usr/bin/env python3
"""Time rank and nullspace over F_p for growing square matrices.

Useful when tuning the block size of the LU: the blocked path should beat the
row-by-row base case once n is a few hundred.
"""

import argparse
import time

import numpy as np

from gdimlab.exactla import nullspace, rank


def bench(n: int, p: int, reps: int, rng) -> tuple[float, float, int]:
    # rank-deficient on purpose so the nullspace is nontrivial
    k = max(1, n - n // 4)
    a = (rng.integers(0, p, (n, k)) @ rng.integers(0, p, (k, n))) % p
    t0 = time.perf_counter()
    for _ in range(reps):
        rk = rank(a, p)
    t1 = time.perf_counter()
    for _ in range(reps):
        basis, _ = nullspace(a, p)
    t2 = time.perf_counter()
    assert rk + basis.shape[0] == n
    return (t1 - t0) / reps, (t2 - t1) / reps, rk


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256, 512])
    ap.add_argument("--p", type=int, default=101)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>6} {'rank s':>10} {'null s':>10} {'rank':>6}")
    for n in args.sizes:
        tr, tn, rk = bench(n, args.p, args.reps, rng)
        print(f"{n:>6} {tr:>10.4f} {tn:>10.4f} {rk:>6}")


if __name__ == "__main__":
    main()
