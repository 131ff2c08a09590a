"""Uniform random perfect matchings (pair the least live vertex with a random partner)."""

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

from . import kernels
from .graph import PerfectMatching, check_order, matching_counts

DEFAULT_BUDGET = 100


def rpm_draws(N, rng):
    """Partner indices for one sample: draw t is uniform on ``[0, N-1-2t)``."""
    return rng.integers(0, np.arange(N - 1, 0, -2, dtype=np.int64), dtype=np.int64)


def rpm_sample(N, rng):
    """One uniformly random perfect matching of K_N; deterministic given ``rng``."""
    if N < 2 or N % 2:
        raise ValueError(f"N must be even and >= 2, got {N}")
    partner = np.empty(N, dtype=np.int32)
    kernels.rpm_fill(rpm_draws(N, rng), partner)
    return PerfectMatching(partner, validate=False)


def rpm_bound(k, n):
    """3k * sqrt(kn ln 2k): the imbalance some matching is guaranteed to meet."""
    return 3 * k * sqrt(k * n * log(2 * k))


@dataclass
class SampleResult:
    matching: PerfectMatching
    f: int
    attempts: int
    exhausted: bool


def sample_until_bound(g, n, budget=DEFAULT_BUDGET, rng=None):
    """Draw RPM samples until one has f(M) <= rpm_bound(k, n).

    On budget exhaustion the best sample seen is returned with ``exhausted=True``.
    """
    check_order(g, n)
    if budget < 1:
        raise ValueError("budget must be positive")
    if rng is None:
        rng = np.random.default_rng()
    bound = rpm_bound(g.num_colors, n)
    best = None
    for attempt in range(1, budget + 1):
        m = rpm_sample(g.order, rng)
        f = int(np.abs(matching_counts(g, m) - n).sum())
        if best is None or f < best[1]:
            best = (m, f)
        if f <= bound:
            return SampleResult(m, f, attempt, False)
    return SampleResult(best[0], best[1], budget, True)
