"""Colored complete graphs, perfect matchings and their imbalance vectors.

Vertices are ``0..N-1``.  Colors are stored 0-based (``0..k-1``); files and
the CLI use ``1..k``.  Edge ``{u, v}`` with ``u < v`` lives at flat index
``v*(v-1)/2 + u``.
"""

from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from . import kernels

MODE_A = 0  # {uv, xy} -> {ux, vy}
MODE_B = 1  # {uv, xy} -> {uy, vx}

MAX_COLORS = 127
MAX_EDGES = 2**31 - 1


def edge_index(u, v):
    if u > v:
        u, v = v, u
    return v * (v - 1) // 2 + u


def edge_from_index(i):
    """Inverse of :func:`edge_index`."""
    v = int((1 + np.sqrt(1 + 8 * i)) // 2)
    while v * (v - 1) // 2 > i:
        v -= 1
    while (v + 1) * v // 2 <= i:
        v += 1
    return i - v * (v - 1) // 2, v


def num_edges(order):
    return comb(order, 2)


class ColoredCompleteGraph:
    """K_N with every edge assigned one of ``k`` colors.

    ``edge_colors`` is the flat triangular array of 0-based colors.  The
    object is treated as immutable; the arrays are marked read-only.
    """

    def __init__(self, order, num_colors, edge_colors):
        order = int(order)
        num_colors = int(num_colors)
        if order < 2 or order % 2:
            raise ValueError(f"order must be an even integer >= 2, got {order}")
        if not 1 <= num_colors <= MAX_COLORS:
            raise ValueError(f"num_colors must be in 1..{MAX_COLORS}, got {num_colors}")
        colors = np.asarray(edge_colors)
        if colors.shape != (num_edges(order),):
            raise ValueError(
                f"expected {num_edges(order)} edge colors for order {order}, got {colors.size}")
        if colors.size and (colors.min() < 0 or colors.max() >= num_colors):
            raise ValueError("edge color out of range 0..k-1")
        self.order = order
        self.num_colors = num_colors
        self.edge_colors = colors.astype(np.int8, copy=True)
        self.edge_colors.flags.writeable = False
        counts = np.bincount(self.edge_colors, minlength=num_colors).astype(np.int64)
        counts.flags.writeable = False
        self.color_counts = counts

    @classmethod
    def from_color_sets(cls, order, color_sets):
        """Build from a list of edge sets, one per color (0-based list position)."""
        colors = np.full(num_edges(order), -1, dtype=np.int64)
        for c, edges in enumerate(color_sets):
            for u, v in edges:
                i = edge_index(u, v)
                if colors[i] >= 0:
                    raise ValueError(f"edge {{{u},{v}}} colored twice")
                colors[i] = c
        if (colors < 0).any():
            missing = edge_from_index(int(np.flatnonzero(colors < 0)[0]))
            raise ValueError(f"edge {set(missing)} has no color")
        return cls(order, len(color_sets), colors)

    @cached_property
    def color_matrix(self):
        """Dense symmetric N x N int8 color table; diagonal is -1."""
        N = self.order
        mat = np.full((N, N), -1, dtype=np.int8)
        iu, iv = np.triu_indices(N, 1)
        idx = iv * (iv - 1) // 2 + iu
        mat[iu, iv] = self.edge_colors[idx]
        mat[iv, iu] = self.edge_colors[idx]
        mat.flags.writeable = False
        return mat

    def edge_color(self, u, v):
        N = self.order
        if not (0 <= u < N and 0 <= v < N):
            raise IndexError(f"vertex out of range 0..{N - 1}: ({u}, {v})")
        if u == v:
            raise ValueError(f"no loop edges: u = v = {u}")
        return int(self.edge_colors[edge_index(u, v)])

    def is_balanced(self):
        return bool((self.color_counts == self.color_counts[0]).all())

    def relabel(self, perm):
        """Graph with vertex ``u`` renamed to ``perm[u]``."""
        perm = np.asarray(perm)
        N = self.order
        iu, iv = np.triu_indices(N, 1)
        pu, pv = perm[iu], perm[iv]
        lo, hi = np.minimum(pu, pv), np.maximum(pu, pv)
        colors = np.empty_like(self.edge_colors)
        colors[hi * (hi - 1) // 2 + lo] = self.edge_colors[iv * (iv - 1) // 2 + iu]
        return ColoredCompleteGraph(N, self.num_colors, colors)

    def __eq__(self, other):
        if not isinstance(other, ColoredCompleteGraph):
            return NotImplemented
        return (self.order == other.order and self.num_colors == other.num_colors
                and np.array_equal(self.edge_colors, other.edge_colors))

    def __hash__(self):
        return hash((self.order, self.num_colors, self.edge_colors.tobytes()))

    def __repr__(self):
        return (f"ColoredCompleteGraph(order={self.order}, num_colors={self.num_colors}, "
                f"counts={self.color_counts.tolist()})")


class PerfectMatching:
    """A perfect matching stored as a read-only partner array."""

    __slots__ = ("partner",)

    def __init__(self, partner, validate=True):
        arr = np.array(partner, dtype=np.int32)
        if validate:
            check_partner(arr)
        arr.flags.writeable = False
        self.partner = arr

    @classmethod
    def from_pairs(cls, pairs, order=None):
        pairs = [tuple(p) for p in pairs]
        if order is None:
            order = 2 * len(pairs)
        partner = np.full(order, -1, dtype=np.int32)
        for u, v in pairs:
            if not (0 <= u < order and 0 <= v < order) or u == v:
                raise ValueError(f"bad pair ({u}, {v}) for order {order}")
            if partner[u] >= 0 or partner[v] >= 0:
                raise ValueError(f"vertex repeated in pair ({u}, {v})")
            partner[u] = v
            partner[v] = u
        return cls(partner)

    @property
    def order(self):
        return len(self.partner)

    @property
    def pairs(self):
        """Sorted tuple of ``(u, v)`` with ``u < v``."""
        p = self.partner
        return tuple((u, int(p[u])) for u in range(len(p)) if u < p[u])

    def edge_arrays(self):
        """``(us, vs)`` int32 arrays of matching edges ordered by edge index."""
        p = self.partner
        u = np.flatnonzero(p > np.arange(len(p))).astype(np.int32)
        v = p[u]
        order = np.argsort(v.astype(np.int64) * (v - 1) // 2 + u, kind="stable")
        return np.ascontiguousarray(u[order]), np.ascontiguousarray(v[order])

    def contains(self, u, v):
        return 0 <= u < len(self.partner) and self.partner[u] == v

    def __eq__(self, other):
        if not isinstance(other, PerfectMatching):
            return NotImplemented
        return np.array_equal(self.partner, other.partner)

    def __hash__(self):
        return hash(self.partner.tobytes())

    def __repr__(self):
        return f"PerfectMatching({list(self.pairs)})"


def check_partner(partner):
    """Raise ValueError unless ``partner`` encodes a perfect matching."""
    N = len(partner)
    if N == 0 or N % 2:
        raise ValueError(f"perfect matching needs an even positive order, got {N}")
    p = np.asarray(partner)
    if p.min() < 0 or p.max() >= N:
        raise ValueError("partner index out of range")
    idx = np.arange(N)
    if (p == idx).any():
        raise ValueError("vertex matched to itself")
    if not np.array_equal(p[p], idx):
        raise ValueError("partner array is not an involution")


@dataclass(frozen=True)
class ColorVector:
    """Per-color deviations ``m_i(M) - n``; ``norm1`` is the imbalance f(M)."""

    deviations: tuple

    @property
    def norm1(self):
        return sum(abs(d) for d in self.deviations)

    def __iter__(self):
        return iter(self.deviations)

    def __len__(self):
        return len(self.deviations)


def matching_counts(g, m):
    """``m_i(M)`` for every color, as an int64 array."""
    if m.order != g.order:
        raise ValueError(f"matching order {m.order} != graph order {g.order}")
    return kernels.color_counts(g.color_matrix, m.partner, g.num_colors)


def check_order(g, n):
    if g.order != 2 * g.num_colors * n:
        raise ValueError(
            f"order {g.order} != 2*k*n = {2 * g.num_colors * n} (k={g.num_colors}, n={n})")


def color_vector(g, m, n):
    check_order(g, n)
    counts = matching_counts(g, m)
    return ColorVector(tuple(int(c) - n for c in counts))


def imbalance(g, m, n):
    """f(M), the 1-norm of the color vector."""
    return color_vector(g, m, n).norm1


def _swap_vertices(m, e1, e2):
    u, v = e1
    x, y = e2
    if not m.contains(u, v):
        raise ValueError(f"edge {e1} is not in the matching")
    if not m.contains(x, y):
        raise ValueError(f"edge {e2} is not in the matching")
    if {u, v} == {x, y}:
        raise ValueError("swap needs two distinct edges")
    return u, v, x, y


def apply_swap(m, e1, e2, mode=MODE_A):
    """Replace ``e1 = uv`` and ``e2 = xy`` by ``ux, vy`` (mode A) or ``uy, vx`` (mode B)."""
    u, v, x, y = _swap_vertices(m, e1, e2)
    if mode == MODE_B:
        x, y = y, x
    elif mode != MODE_A:
        raise ValueError(f"unknown swap mode {mode!r}")
    p = m.partner.copy()
    p[u], p[x] = x, u
    p[v], p[y] = y, v
    return PerfectMatching(p, validate=False)


def swap_delta(g, m, e1, e2, mode, n, counts=None):
    """f(after swap) - f(before) from the four edge colors involved.

    Pass ``counts`` (from :func:`matching_counts`) to skip the O(N) recount.
    """
    u, v, x, y = _swap_vertices(m, e1, e2)
    if mode not in (MODE_A, MODE_B):
        raise ValueError(f"unknown swap mode {mode!r}")
    if counts is None:
        counts = matching_counts(g, m)
    return int(kernels.swap_delta(g.color_matrix, np.asarray(counts, dtype=np.int64),
                                  n, u, v, x, y, mode))
