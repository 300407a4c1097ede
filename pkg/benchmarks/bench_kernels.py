#!/usr/bin/env python3
"""Numba vs pure-numpy timings for the seminorm, hill-climb and torus-grid kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]

Both variants are called directly (the ``_nb`` and ``_np`` twins), so the
``NCGDIST_DISABLE_NUMBA`` flag does not matter here.  Outputs of the two
variants are compared before timing.
"""
import argparse
import time

import numpy as np

from ncgdist import kernels
from ncgdist.solver import SolverOptions, _reduced
from ncgdist.triple import graph_triple, truncated_moyal_triple


def best_of(fn, repeat):
    fn()  # warm-up, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def reduced_problem(t):
    red = _reduced(t, SolverOptions().kernel_tol)
    return red.tens, red.sizes, red.offsets


def cases():
    rng = np.random.default_rng(0)
    W = rng.uniform(0.3, 3, (6, 6))
    W = np.triu(W, 1)
    W = W + W.T
    yield "graph N=6", reduced_problem(graph_triple(6, W))
    for N in (4, 8):
        yield f"moyal N={N}", reduced_problem(truncated_moyal_triple(N, 2.0))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(1)
    print(f"{'kernel':34s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")

    def report(name, f_np, f_nb):
        a, b = f_np(), f_nb()
        for x, y in zip(np.atleast_1d(a), np.atleast_1d(b)):
            np.testing.assert_allclose(np.asarray(x, float), np.asarray(y, float),
                                       rtol=1e-8, atol=1e-10)
        t_np, t_nb = best_of(f_np, args.repeat), best_of(f_nb, args.repeat)
        print(f"{name:34s} {1e3 * t_np:11.3f} {1e3 * t_nb:11.3f} {t_np / t_nb:8.1f}x")

    for label, (tens, sizes, offsets) in cases():
        r = tens.shape[0]
        Y = rng.normal(size=(2000, r))
        report(f"lipschitz_batch {label} (2000)",
               lambda: kernels.lipschitz_batch_np(Y, tens, sizes, offsets),
               lambda: kernels.lipschitz_batch_nb(Y, tens, sizes, offsets))
        g = rng.normal(size=r)
        y0 = rng.normal(size=r)
        report(f"hill_climb {label}",
               lambda: kernels.hill_climb_np(y0.copy(), g, tens, sizes, offsets, 0.25, 1e-5, 200)[1],
               lambda: kernels.hill_climb_nb(y0.copy(), g, tens, sizes, offsets, 0.25, 1e-5, 200)[1])

    args_t = (2.0, 1.0, 0.3, 0.8, 1.1, 2.5)
    for ngrid in (128, 256, 512):
        report(f"torus_grid {ngrid}x{ngrid}",
               lambda: kernels.torus_grid_np(*args_t, ngrid),
               lambda: kernels.torus_grid_nb(*args_t, ngrid))


if __name__ == "__main__":
    main()
