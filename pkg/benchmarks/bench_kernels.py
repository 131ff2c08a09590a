"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from chromatch import _pykernels, kernels
from chromatch.instances import random_balanced
from chromatch.sampler import rpm_draws, rpm_sample


def cases():
    g = random_balanced(4, 25, 0)
    m = rpm_sample(g.order, np.random.default_rng(0))
    counts = np.asarray(_pykernels.color_counts(g.color_matrix, m.partner, 4), dtype=np.int64)
    eu, ev = m.edge_arrays()
    draws = rpm_draws(g.order, np.random.default_rng(1))
    out = np.empty(g.order, dtype=np.int32)
    small = random_balanced(3, 2, 0)
    return {
        "rpm_fill N=200": lambda mod: mod.rpm_fill(draws, out),
        "color_counts N=200": lambda mod: mod.color_counts(g.color_matrix, m.partner, 4),
        "swap_scan N=200": lambda mod: mod.swap_scan(g.color_matrix, eu, ev, counts, 25),
        "enumerate K12": lambda mod: mod.enumerate_stats(small.color_matrix, 12, 3, 2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if kernels.compiled is None:
        print("compiled kernels not built; only the Python timings are shown")
    print(f"{'kernel':<22}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for name, fn in cases().items():
        times = {}
        for label, mod in (("python", _pykernels), ("cython", kernels.compiled)):
            if mod is None:
                continue
            number = 1 if label == "python" else 20
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat))
            times[label] = 1000 * best / number
        py = times["python"]
        cy = times.get("cython")
        if cy is None:
            print(f"{name:<22}{py:>14.3f}{'-':>14}{'-':>10}")
        else:
            print(f"{name:<22}{py:>14.3f}{cy:>14.4f}{py / cy:>9.0f}x")


if __name__ == "__main__":
    main()
