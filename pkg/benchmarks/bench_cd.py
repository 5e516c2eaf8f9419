"""Coordinate-descent backend benchmark: numba kernels vs the numpy fallback.

    python benchmarks/bench_cd.py [--n 250] [--p 1024 4096] [--repeat 3]

Times a full warm-started Lasso path (truncated at 41 nonzeros, as the BIC
rule needs) on a constant-correlation design for each backend, and checks the
two backends agree on the coefficients.
"""
import argparse
import time

import numpy as np

from puffer import _accel
from puffer.designs import DesignKind, DesignSpec, sample_beta_star, sample_design, sample_noise
from puffer.lasso import lasso_path


def _problem(n, p, rho, seed):
    X = sample_design(DesignSpec(DesignKind.CONSTANT_CORRELATION, n, p, seed, rho=rho))
    Y = X @ sample_beta_star(p, 20) + sample_noise(n, 1.0, seed + 1)
    return X, Y


def _time_path(X, Y, backend, grid, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        path = lasso_path(X, Y, grid, max_active=40, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, path


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=250)
    ap.add_argument("--p", type=int, nargs="+", default=[256, 1024, 4096])
    ap.add_argument("--rho", type=float, default=0.5)
    ap.add_argument("--grid", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if _accel.HAS_NUMBA else [])
    if _accel.HAS_NUMBA:
        X, Y = _problem(30, 20, args.rho, 0)
        t0 = time.perf_counter()
        lasso_path(X, Y, 5, backend="numba")
        print(f"numba compile/cache load: {time.perf_counter() - t0:.2f}s")
    else:
        print("numba not installed; timing the numpy backend only")

    print(f"{'p':>6} {'backend':>8} {'seconds':>9} {'points':>7} {'speedup':>8}")
    for p in args.p:
        X, Y = _problem(args.n, p, args.rho, 7)
        times, paths = {}, {}
        for b in backends:
            times[b], paths[b] = _time_path(X, Y, b, args.grid, args.repeat)
        for b in backends:
            speed = times["numpy"] / times[b]
            print(f"{p:>6} {b:>8} {times[b]:>9.3f} {len(paths[b]):>7} {speed:>7.1f}x")
        if len(backends) == 2:
            k = min(len(paths["numpy"]), len(paths["numba"]))
            dev = np.abs(paths["numpy"].coefs[:k] - paths["numba"].coefs[:k]).max()
            print(f"{'':>6} max |numpy - numba| coefficient gap: {dev:.2e}")


if __name__ == "__main__":
    main()
