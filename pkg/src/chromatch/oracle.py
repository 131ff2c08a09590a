"""Exhaustive ground truth for small complete graphs."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import PerfectMatching, check_order

MAX_ENUM_ORDER = 16
MAX_LEMMA1_ORDER = 14


def double_factorial(m):
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def _check_enum_order(N, cap):
    if N < 2 or N % 2 or N > cap:
        raise ValueError(f"order must be even and in 2..{cap}, got {N}")


def enumerate_matchings(N):
    """Yield every perfect matching of K_N once, least unmatched vertex paired first."""
    _check_enum_order(N, MAX_ENUM_ORDER)
    partner = np.full(N, -1, dtype=np.int32)

    def rec(x):
        while x < N and partner[x] >= 0:
            x += 1
        if x == N:
            yield PerfectMatching(partner)
            return
        for y in range(x + 1, N):
            if partner[y] < 0:
                partner[x], partner[y] = y, x
                yield from rec(x + 1)
                partner[x] = partner[y] = -1

    yield from rec(0)


@dataclass
class MinF:
    value: int
    witness: PerfectMatching
    count: int
    total: int


def min_f(g, n):
    """Exact minimum of f over all perfect matchings, with a witness and the number of minimizers."""
    check_order(g, n)
    _check_enum_order(g.order, MAX_ENUM_ORDER)
    best, witness, nmin, _, total = kernels.enumerate_stats(
        g.color_matrix, g.order, g.num_colors, n)
    return MinF(int(best), PerfectMatching(witness), int(nmin), int(total))


def verify_lemma1(g, n):
    """Exact sum of v(M) over all perfect matchings of g, as a tuple of ints.

    Zero for every balanced coloring; nonzero in general otherwise.
    """
    check_order(g, n)
    _check_enum_order(g.order, MAX_LEMMA1_ORDER)
    _, _, _, sums, total = kernels.enumerate_stats(g.color_matrix, g.order, g.num_colors, n)
    return tuple(int(s) - n * int(total) for s in sums)
