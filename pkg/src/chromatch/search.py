"""Swap-based local search minimizing f(M).

A move takes two matching edges ``uv, xy`` and rewires them to ``ux, vy``
(mode A) or ``uy, vx`` (mode B).  Descent always takes the best improving
move; at a local minimum, a budget of random zero-delta moves lets the search
walk the plateau.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graph import MODE_B, PerfectMatching, check_order, matching_counts
from .sampler import rpm_sample

DEFAULT_PLATEAU = 200


@dataclass(frozen=True)
class Move:
    e1: tuple
    e2: tuple
    mode: int
    delta: int


@dataclass
class SearchResult:
    matching: PerfectMatching
    f: int
    trace: list = field(default_factory=list)  # (kind, f) per step, kind in {"start", "improve", "plateau"}

    @property
    def improving_steps(self):
        return sum(1 for kind, _ in self.trace if kind == "improve")

    @property
    def plateau_steps(self):
        return sum(1 for kind, _ in self.trace if kind == "plateau")


def _apply(partner, u, v, x, y, mode):
    if mode == MODE_B:
        x, y = y, x
    partner[u], partner[x] = x, u
    partner[v], partner[y] = y, v
    return u, v, x, y


def _scan(g, m, n, counts):
    eu, ev = m.edge_arrays()
    return eu, ev, kernels.swap_scan(g.color_matrix, eu, ev, counts, n)


def best_swap(g, m, n):
    """The improving move with the most negative delta, or None.

    Ties go to the lowest (edge index, edge index, mode), edges taken in
    edge-index order.
    """
    counts = matching_counts(g, m)
    eu, ev, (i, j, mode, delta, _) = _scan(g, m, n, counts)
    if i < 0:
        return None
    return Move((int(eu[i]), int(ev[i])), (int(eu[j]), int(ev[j])), int(mode), int(delta))


def local_search(g, m0, n, plateau_budget=DEFAULT_PLATEAU, rng=None, checked=False):
    """Descend from ``m0``; spend ``plateau_budget`` random zero-delta moves at minima.

    f is tracked through the move deltas; ``checked=True`` recounts after every
    step and raises on disagreement.
    """
    check_order(g, n)
    if rng is None:
        rng = np.random.default_rng()
    cm = g.color_matrix
    partner = m0.partner.copy()
    counts = matching_counts(g, m0)
    f = int(np.abs(counts - n).sum())
    trace = [("start", f)]
    budget = plateau_budget
    while f > 0:
        m = PerfectMatching(partner, validate=False)
        eu, ev, (i, j, mode, delta, zeros) = _scan(g, m, n, counts)
        if i >= 0:
            kind = "improve"
        elif budget > 0 and zeros > 0:
            i, j, mode = kernels.nth_zero_swap(cm, eu, ev, counts, n, int(rng.integers(zeros)))
            delta = 0
            budget -= 1
            kind = "plateau"
        else:
            break
        u, v, x, y = _apply(partner, int(eu[i]), int(ev[i]), int(eu[j]), int(ev[j]), mode)
        counts[cm[u, v]] -= 1
        counts[cm[x, y]] -= 1
        counts[cm[u, x]] += 1
        counts[cm[v, y]] += 1
        f += int(delta)
        trace.append((kind, f))
        if checked:
            recount = matching_counts(g, PerfectMatching(partner))
            if not np.array_equal(recount, counts) or int(np.abs(recount - n).sum()) != f:
                raise AssertionError("incremental f diverged from recount")
    return SearchResult(PerfectMatching(partner, validate=False), f, trace)


@dataclass
class RestartStats:
    start_f: int
    final_f: int
    improving_steps: int
    plateau_steps: int


def search_from_rpm(g, n, restarts=5, plateau_budget=DEFAULT_PLATEAU, rng=None):
    """Best of ``restarts`` local searches started from RPM samples.

    Returns ``(best SearchResult, [RestartStats, ...])``.
    """
    if restarts < 1:
        raise ValueError("restarts must be positive")
    if rng is None:
        rng = np.random.default_rng()
    best = None
    stats = []
    for _ in range(restarts):
        m0 = rpm_sample(g.order, rng)
        res = local_search(g, m0, n, plateau_budget, rng)
        stats.append(RestartStats(res.trace[0][1], res.f, res.improving_steps, res.plateau_steps))
        if best is None or res.f < best.f:
            best = res
    return best, stats
