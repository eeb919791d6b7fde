"""Compare the compiled and numpy kernel backends on realistic workloads.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from countstats import _kernels_py, models, trajectory

try:
    from countstats import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    p = models.CavityParams.from_detuning(0.0, models.angular(10.0), models.angular(2.7))
    nr = trajectory.norm_record(p, 20 / p.kappa)
    u = np.random.default_rng(0).random(200_000)
    times = np.cumsum(np.random.default_rng(1).exponential(1 / 8.4, 100_000))
    return {
        "invert_survival (2e5 draws)": lambda k: k.invert_survival(0.0, nr.h, nr.norm, nr.dnorm, u),
        "pair_lag_counts (1e5 clicks, 100 bins)": lambda k: k.pair_lag_counts(times, 0.005, 100, times[-1] - 0.5),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':42s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speed-up':>9s}")
    for name, call in workloads().items():
        py = _best(lambda: call(_kernels_py), args.repeat)
        if _compiled is None:
            print(f"{name:42s} {1e3 * py:11.2f} {'n/a':>12s} {'n/a':>9s}")
            continue
        cy = _best(lambda: call(_compiled), args.repeat)
        same = np.array_equal(np.nan_to_num(call(_kernels_py), nan=-1), np.nan_to_num(call(_compiled), nan=-1))
        flag = "" if same else "  (outputs differ!)"
        print(f"{name:42s} {1e3 * py:11.2f} {1e3 * cy:12.2f} {py / cy:8.1f}x{flag}")


if __name__ == "__main__":
    main()
