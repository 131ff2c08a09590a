"""Pure-Python versions of the hot loops.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same results, bit for bit.  ``chromatch.kernels`` picks one at import.
"""

import numpy as np


def rpm_fill(draws, partner):
    """Build a matching from pre-drawn indices, pairing min(R) each round.

    ``draws[t]`` must lie in ``[0, N - 1 - 2t)``; it indexes the compacted
    array of live vertices other than the current minimum.
    """
    N = len(partner)
    live = list(range(N))
    pos = list(range(N))
    removed = [False] * N
    size = N
    cursor = 0
    t = 0
    while size > 0:
        while removed[cursor]:
            cursor += 1
        x = cursor
        # swap-remove x
        size -= 1
        last = live[size]
        live[pos[x]] = last
        pos[last] = pos[x]
        removed[x] = True
        y = live[draws[t]]
        size -= 1
        last = live[size]
        live[pos[y]] = last
        pos[last] = pos[y]
        removed[y] = True
        partner[x] = y
        partner[y] = x
        t += 1


def color_counts(colmat, partner, k):
    counts = np.zeros(k, dtype=np.int64)
    for u in range(len(partner)):
        v = partner[u]
        if u < v:
            counts[colmat[u, v]] += 1
    return counts


def _move_delta(cm, counts, n, u, v, x, y, a, b):
    # counts is a plain list; mutated then restored
    delta = 0
    for c, s in ((cm[u][v], -1), (cm[x][y], -1), (cm[u][a], 1), (cm[v][b], 1)):
        before = abs(counts[c] - n)
        counts[c] += s
        delta += abs(counts[c] - n) - before
    counts[cm[u][v]] += 1
    counts[cm[x][y]] += 1
    counts[cm[u][a]] -= 1
    counts[cm[v][b]] -= 1
    return delta


def swap_delta(colmat, counts, n, u, v, x, y, mode):
    """f-change for replacing {uv, xy} by {ux, vy} (mode 0) or {uy, vx} (mode 1)."""
    cnt = [int(c) for c in counts]
    cm = colmat
    if mode == 0:
        return _move_delta(cm, cnt, int(n), u, v, x, y, x, y)
    return _move_delta(cm, cnt, int(n), u, v, x, y, y, x)


def swap_scan(colmat, eu, ev, counts, n):
    """Scan every edge pair and both modes.

    Returns ``(i, j, mode, delta, zero_count)`` where ``(i, j, mode)`` is the
    first move (lexicographic) with minimum negative delta, or ``(-1, -1, -1, 0,
    zero_count)`` if no move improves.
    """
    cm = colmat.tolist()
    cnt = [int(c) for c in counts]
    n = int(n)
    us = [int(a) for a in eu]
    vs = [int(a) for a in ev]
    m = len(us)
    best = (-1, -1, -1, 0)
    zeros = 0
    for i in range(m):
        u, v = us[i], vs[i]
        for j in range(i + 1, m):
            x, y = us[j], vs[j]
            for mode in (0, 1):
                if mode == 0:
                    d = _move_delta(cm, cnt, n, u, v, x, y, x, y)
                else:
                    d = _move_delta(cm, cnt, n, u, v, x, y, y, x)
                if d < best[3]:
                    best = (i, j, mode, d)
                elif d == 0:
                    zeros += 1
    return best + (zeros,)


def nth_zero_swap(colmat, eu, ev, counts, n, r):
    """The r-th (0-based, scan order) zero-delta move as ``(i, j, mode)``."""
    cm = colmat.tolist()
    cnt = [int(c) for c in counts]
    n = int(n)
    us = [int(a) for a in eu]
    vs = [int(a) for a in ev]
    m = len(us)
    for i in range(m):
        u, v = us[i], vs[i]
        for j in range(i + 1, m):
            x, y = us[j], vs[j]
            for mode in (0, 1):
                if mode == 0:
                    d = _move_delta(cm, cnt, n, u, v, x, y, x, y)
                else:
                    d = _move_delta(cm, cnt, n, u, v, x, y, y, x)
                if d == 0:
                    if r == 0:
                        return i, j, mode
                    r -= 1
    raise IndexError("fewer zero-delta moves than requested")


def enumerate_stats(colmat, N, k, n):
    """Exhaustive DFS over perfect matchings of K_N in canonical order.

    Returns ``(min_f, witness_partner, n_minimizers, color_sums, total)``
    where ``color_sums[i]`` is the sum over all matchings of m_i(M).
    """
    cm = colmat.tolist()
    partner = [-1] * N
    counts = [0] * k
    sums = [0] * k
    state = {"best": None, "witness": None, "nmin": 0, "total": 0}

    def rec():
        x = 0
        while x < N and partner[x] >= 0:
            x += 1
        if x == N:
            f = 0
            for c in range(k):
                f += abs(counts[c] - n)
                sums[c] += counts[c]
            state["total"] += 1
            if state["best"] is None or f < state["best"]:
                state["best"] = f
                state["witness"] = list(partner)
                state["nmin"] = 1
            elif f == state["best"]:
                state["nmin"] += 1
            return
        row = cm[x]
        for y in range(x + 1, N):
            if partner[y] >= 0:
                continue
            c = row[y]
            partner[x] = y
            partner[y] = x
            counts[c] += 1
            rec()
            counts[c] -= 1
            partner[x] = -1
            partner[y] = -1

    rec()
    witness = np.array(state["witness"], dtype=np.int32)
    return (state["best"], witness, state["nmin"],
            np.array(sums, dtype=np.int64), state["total"])
