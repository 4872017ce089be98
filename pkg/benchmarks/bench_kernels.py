"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Each workload is run on both backends; outputs are checked for equality
before timings are reported.
"""
import argparse
import time

import numpy as np

from couponfriends import bounds, kernels
from couponfriends.rng import RngStream


def workloads(scale):
    n, m = 50, 20
    rc, re = bounds.rc_main_ub(n, m), bounds.re_main_ub(n, m)
    t = max(1, int(5 * scale))
    return {
        f"run_trials n=50 m=20 r_c={rc} r_e={re} x{t}":
            lambda k: k.run_trials(1, 0, t, n, m, rc, re, 1),
        f"run_trials n=4 m=3 r_c=6 r_e=0 x{int(2000 * scale)}":
            lambda k: k.run_trials(1, 0, int(2000 * scale), 4, 3, 6, 0, 0),
        f"until_m_sets n=2000 m=1 x{max(1, int(5 * scale))}":
            lambda k: k.until_m_sets_batch(1, 0, max(1, int(5 * scale)), 2000, 1),
        f"sample_pairs m=10 x{int(50000 * scale)}":
            lambda k: k.sample_pairs(RngStream(1).state, 10, int(50000 * scale)),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args()

    if "cython" not in kernels.BACKENDS:
        print("compiled kernels not built; only the Python backend is available")
    names = sorted(kernels.BACKENDS)
    print(f"{'workload':<48}" + "".join(f"{b:>12}" for b in names) + f"{'speedup':>10}")
    for label, fn in workloads(args.scale).items():
        times, outs = {}, {}
        for b in names:
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                outs[b] = fn(kernels.BACKENDS[b])
                best = min(best, time.perf_counter() - t0)
            times[b] = best
        if len(names) == 2:
            assert _same(outs["cython"], outs["python"]), f"backends disagree on {label}"
        row = f"{label:<48}" + "".join(f"{times[b]:>11.4f}s" for b in names)
        if len(names) == 2:
            row += f"{times['python'] / times['cython']:>9.0f}x"
        print(row)


if __name__ == "__main__":
    main()
