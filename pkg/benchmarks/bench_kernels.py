"""Compare the compiled curvature kernel with the numpy path on random metric jets.

Usage: python3 benchmarks/bench_kernels.py [--points 100000] [--n 3] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from corrugate.curvature.audit import random_metric_jet
from corrugate.curvature.backend import compiled_available, ricci_scalar


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=100_000)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    mj = random_metric_jet(np.random.default_rng(args.seed), args.n, (args.points,))
    t_np = best_time(lambda: ricci_scalar(mj, "numpy"), args.repeat)
    print(f"numpy     n={args.n} points={args.points}: {t_np:.3f} s")
    if not compiled_available():
        print("compiled  kernel not built; install with a C compiler and Cython to compare")
        return
    t_c = best_time(lambda: ricci_scalar(mj, "compiled"), args.repeat)
    diff = np.abs(ricci_scalar(mj, "compiled")[1] - ricci_scalar(mj, "numpy")[1]).max()
    print(f"compiled  n={args.n} points={args.points}: {t_c:.3f} s  (speedup {t_np / t_c:.2f}x, max |dScal| {diff:.1e})")


if __name__ == "__main__":
    main()
