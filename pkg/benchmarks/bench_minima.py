"""Benchmark the successive-minima enumeration kernels: numba @njit vs the
pure-numpy fallback (selected by the STURMLAB_NO_NUMBA env flag).

Both paths are timed in-process by calling the module-level kernel functions
directly, so one run prints the full comparison.  A first untimed call absorbs
numba's JIT compilation.

Usage: python benchmarks/bench_minima.py [--q 2,5,8] [--repeat 5]
"""
import argparse
import time

import mpmath

from sturmlab import bl_family, make_bundle, SturmianProgram
from sturmlab import kernels
from sturmlab.paramgeo import CandidateBuilder, minima_candidates


def _work(fn_primal, fn_dual, xi, xi2, q, R, R0, cutoff, cutoff_d):
    import numpy as np
    pts = np.empty((kernels._CAP, 3), dtype=np.int64)
    lam = np.empty(kernels._CAP, dtype=np.float64)
    n1 = fn_primal(xi, xi2, q, R, cutoff, pts, lam)
    n2 = fn_dual(xi, xi2, q, R0, cutoff_d, pts, lam)
    return n1, n2


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", default="2,5,8")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    qs = [float(x) for x in args.q.split(",")]

    bundle = make_bundle(bl_family(1, 2), SturmianProgram.all_ones())
    cb = CandidateBuilder(bundle, prec=256)

    print(f"numba available: {kernels.HAS_NUMBA}   (STURMLAB_NO_NUMBA disables)")
    rows = []
    for q in qs:
        # candidate triple sets the cutoff, same as minima_bruteforce does
        sample = minima_candidates(cb, mpmath.mpf(q))
        xi, xi2 = cb.u_float()
        cutoff = float(mpmath.exp(sample.L[2])) * 2.0
        R = min(int(cutoff * 2) + 2, 10_000)
        cutoff_d = float(mpmath.exp(sample.Lstar[2]))
        R0 = min(int(cutoff_d * mpmath.e ** q * 1.01) + 2, 100_000)

        timings = {}
        variants = [("numpy", kernels._primal_numpy, kernels._dual_numpy)]
        if kernels.HAS_NUMBA:
            variants.append(("numba", kernels._primal_njit, kernels._dual_njit))
        for name, fp, fd in variants:
            _work(fp, fd, xi, xi2, q, R, R0, cutoff, cutoff_d)  # warm up / JIT
            best = min(
                _timed(fp, fd, xi, xi2, q, R, R0, cutoff, cutoff_d)
                for _ in range(args.repeat))
            timings[name] = best
        speedup = (timings["numpy"] / timings["numba"]
                   if "numba" in timings else float("nan"))
        rows.append((q, R, R0, timings.get("numpy"), timings.get("numba"), speedup))

    print(f"{'q':>5} {'R':>7} {'R0':>8} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for q, R, R0, tn, tj, s in rows:
        tj_s = f"{tj*1e3:11.3f}" if tj is not None else f"{'-':>11}"
        print(f"{q:5.1f} {R:7d} {R0:8d} {tn*1e3:11.3f} {tj_s} {s:8.2f}")


def _timed(fp, fd, xi, xi2, q, R, R0, cutoff, cutoff_d):
    t0 = time.perf_counter()
    _work(fp, fd, xi, xi2, q, R, R0, cutoff, cutoff_d)
    return time.perf_counter() - t0


if __name__ == "__main__":
    main()
