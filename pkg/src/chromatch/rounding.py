"""Convex-combination rounding: from a certificate that the origin lies in the hull
of matching vectors to a single matching with bounded imbalance.

Pieces, in pipeline order:

* :func:`certify_origin` finds exact rational weights on sampled matchings whose
  weighted color vectors sum to zero; :func:`caratheodory_reduce` trims the
  support to at most k+1.
* :func:`alternating_cycles` and :func:`split_and_group` turn two matchings into
  bundles of short alternating cycles.
* :func:`round_bundles` toggles a random subset of bundles.
* :func:`theorem3_pipeline` merges the k+1 matchings one at a time.

All vector arithmetic is on exact integers and Fractions.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, log, sqrt

import numpy as np

from .graph import PerfectMatching, check_order, matching_counts
from .instances import HullCertificateError
from .sampler import rpm_sample
from .simplex import feasible_point, null_vector

log_ = logging.getLogger(__name__)

RETRY_CAP = 50


class ConsistencyError(RuntimeError):
    """A construction violated its own postconditions (a bug, never bad input)."""


def ceil_sqrt(x):
    r = isqrt(x)
    return r if r * r == x else r + 1


def lemma3_bound(k, n):
    """Per-stage rounding tolerance 13 k^(7/4) n^(3/4) sqrt(ln 2k)."""
    return 13 * k ** 1.75 * n ** 0.75 * sqrt(log(2 * k))


def theorem3_bound(k, n):
    """Final imbalance bound 13 k^(11/4) n^(3/4) sqrt(ln 2k)."""
    return 13 * k ** 2.75 * n ** 0.75 * sqrt(log(2 * k))


def vec(g, m, n):
    """v(M) as a tuple of Python ints."""
    return tuple(int(c) - n for c in matching_counts(g, m))


def norm1(x):
    return sum(abs(a) for a in x)


# -- alternating cycles --------------------------------------------------------


@dataclass(frozen=True)
class AlternatingCycle:
    """Vertex sequence ``w0 w1 ... w_{2m-1}``; edges ``w_{2t} w_{2t+1}`` are in M1,
    the others (including the closing edge ``w_{2m-1} w0``) are not."""

    vertices: tuple

    @property
    def m1_edges(self):
        w = self.vertices
        return [(w[i], w[i + 1]) for i in range(0, len(w), 2)]

    @property
    def other_edges(self):
        w = self.vertices
        L = len(w)
        return [(w[i], w[(i + 1) % L]) for i in range(1, L, 2)]

    @property
    def m1_count(self):
        return len(self.vertices) // 2

    def __len__(self):
        return len(self.vertices)


def _same_order(m1, m2):
    if m1.order != m2.order:
        raise ValueError(f"vertex-set mismatch: orders {m1.order} and {m2.order}")


def alternating_cycles(m1, m2):
    """Cycles of M1 Δ M2, each started at its least vertex and walked along M1 first."""
    _same_order(m1, m2)
    p1, p2 = m1.partner, m2.partner
    N = m1.order
    seen = np.zeros(N, dtype=bool)
    cycles = []
    for s in range(N):
        if seen[s] or p1[s] == p2[s]:
            continue
        walk = []
        w = s
        while True:
            a = int(p1[w])
            walk.append(w)
            walk.append(a)
            seen[w] = seen[a] = True
            w = int(p2[a])
            if w == s:
                break
        cycles.append(AlternatingCycle(tuple(walk)))
    return cycles


def toggle(m1, cycles):
    """M1 Δ (edges of the given cycles); each cycle must be M1-alternating."""
    p = m1.partner.copy()
    for cyc in cycles:
        w = cyc.vertices
        L = len(w)
        for i in range(1, L, 2):
            a, b = w[i], w[(i + 1) % L]
            p[a], p[b] = b, a
    return PerfectMatching(p, validate=False)


# -- splitting and grouping ----------------------------------------------------


@dataclass
class CycleBundle:
    """Vertex-disjoint M1-alternating cycles toggled together."""

    cycles: list
    delta: tuple  # v(M1 Δ E(bundle)) - v(M1)

    @property
    def m1_edge_count(self):
        return sum(c.m1_count for c in self.cycles)

    @property
    def edge_set(self):
        out = set()
        for c in self.cycles:
            for u, v in c.m1_edges + c.other_edges:
                out.add((min(u, v), max(u, v)))
        return out


def cut_cycle(cyc, kn):
    """Split a long cycle into pieces with between ceil(sqrt kn) and 2 ceil(sqrt kn) - 1
    M1 edges each, closing every piece with one new edge."""
    m = cyc.m1_count
    c = ceil_sqrt(kn)
    r = -(-m // (2 * c - 1))
    if r < 2:
        return [cyc]
    q, rem = divmod(m, r)
    pieces = []
    start = 0
    w = cyc.vertices
    for i in range(r):
        size = q + (1 if i < rem else 0)
        pieces.append(AlternatingCycle(w[2 * start:2 * (start + size)]))
        start += size
    return pieces


def _bundle_delta(g, m1, cycles, n, base):
    return tuple(a - b for a, b in zip(vec(g, toggle(m1, cycles), n), base))


def split_and_group(g, m1, m2, n, checked=True):
    """Rebuild M1 Δ M2 into a bundle collection.

    Cycles with more than 5 sqrt(kn) M1 edges are cut into pieces; cycles with
    fewer than sqrt(kn) M1 edges are packed first-fit decreasing into bundles of
    at most 4 sqrt(kn) M1 edges; every other cycle is its own bundle.

    Returns ``(m2_prime, bundles)`` with ``m2_prime = M1 Δ (union of bundles)``.
    """
    check_order(g, n)
    kn = g.num_colors * n
    base = vec(g, m1, n)
    pieces = []
    for cyc in alternating_cycles(m1, m2):
        m = cyc.m1_count
        pieces.extend(cut_cycle(cyc, kn) if m * m > 25 * kn else [cyc])

    singles = [c for c in pieces if c.m1_count ** 2 >= kn]
    short = sorted((c for c in pieces if c.m1_count ** 2 < kn),
                   key=lambda c: -c.m1_count)
    bins = []
    loads = []
    for cyc in short:
        for i, load in enumerate(loads):
            if (load + cyc.m1_count) ** 2 <= 16 * kn:
                bins[i].append(cyc)
                loads[i] += cyc.m1_count
                break
        else:
            bins.append([cyc])
            loads.append(cyc.m1_count)

    bundles = [CycleBundle([c], _bundle_delta(g, m1, [c], n, base)) for c in singles]
    bundles += [CycleBundle(b, _bundle_delta(g, m1, b, n, base)) for b in bins]
    m2p = toggle(m1, pieces)
    if checked:
        failed = [name for name, ok in check_split(g, m1, m2, m2p, bundles, n).items() if not ok]
        if failed:
            raise ConsistencyError(f"split_and_group postconditions failed: {failed}")
    return m2p, bundles


def _is_alternating(m1, cyc):
    w = cyc.vertices
    L = len(w)
    if L < 4 or L % 2 or len(set(w)) != L:
        return False
    p = m1.partner
    for i in range(L):
        a, b = w[i], w[(i + 1) % L]
        if (p[a] == b) != (i % 2 == 0):
            return False
    return True


def check_split(g, m1, m2, m2p, bundles, n):
    """Each postcondition of :func:`split_and_group` mapped to pass/fail."""
    kn = g.num_colors * n
    union = set()
    disjoint = True
    used = set()
    alternating = True
    light = True
    delta_ok = True
    base = vec(g, m1, n)
    for b in bundles:
        verts = [v for c in b.cycles for v in c.vertices]
        if used.intersection(verts) or len(set(verts)) != len(verts):
            disjoint = False
        used.update(verts)
        union |= b.edge_set
        alternating &= all(_is_alternating(m1, c) for c in b.cycles)
        light &= b.m1_edge_count ** 2 <= 25 * kn
        if alternating:
            delta_ok &= b.delta == _bundle_delta(g, m1, b.cycles, n, base)
    m1_edges = set(m1.pairs)
    rebuilt = m1_edges.symmetric_difference(union)
    d = norm1(a - b for a, b in zip(vec(g, m2, n), vec(g, m2p, n)))
    return {
        "i_symmetric_difference": rebuilt == set(m2p.pairs),
        "ii_vector_shift": d * d <= 4 * kn,
        "iii_bundle_count": len(bundles) ** 2 <= 9 * kn,
        "iv_disjoint": disjoint,
        "iv_alternating": alternating,
        "iv_light": light,
        "delta_recomputed": delta_ok,
    }


# -- randomized rounding -------------------------------------------------------


@dataclass
class RoundResult:
    matching: PerfectMatching
    attempts: int
    deviation: Fraction  # || v(M) - target ||_1
    accepted: bool
    chosen: list  # bundle indices toggled


def rounding_target(v1, v2p, p):
    """p * v(M1) + (1 - p) * v(M2') with exact Fractions."""
    p = Fraction(p)
    return tuple(p * a + (1 - p) * b for a, b in zip(v1, v2p))


def round_bundles(g, m1, bundles, p, n, rng, retry_cap=RETRY_CAP, accept=None):
    """Toggle each bundle independently with probability 1 - p.

    ``p`` is the weight on M1, so the expected vector is exactly
    ``p v(M1) + (1-p) v(M2')``.  Coins are redrawn until the 1-norm deviation
    from that target is within :func:`lemma3_bound` (and ``accept(matching, v)``
    holds, if given), up to ``retry_cap`` draws; otherwise the closest draw is
    returned with ``accepted=False``.
    """
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    k = g.num_colors
    v1 = vec(g, m1, n)
    v2p = tuple(a + sum(b.delta[i] for b in bundles) for i, a in enumerate(v1))
    target = rounding_target(v1, v2p, p)
    bound = lemma3_bound(k, n)
    q = 1 - p
    best = None
    for attempt in range(1, retry_cap + 1):
        coins = rng.integers(0, q.denominator, size=len(bundles)) < q.numerator
        chosen = [i for i in range(len(bundles)) if coins[i]]
        v = list(v1)
        for i in chosen:
            for c in range(k):
                v[c] += bundles[i].delta[c]
        dev = norm1(a - t for a, t in zip(v, target))
        m = None
        ok = dev <= bound
        if ok and accept is not None:
            m = toggle(m1, [c for i in chosen for c in bundles[i].cycles])
            ok = accept(m, tuple(v))
        if best is None or dev < best[0]:
            best = (dev, chosen, m)
        if ok:
            if m is None:
                m = toggle(m1, [c for i in chosen for c in bundles[i].cycles])
            return RoundResult(m, attempt, dev, True, chosen)
    dev, chosen, m = best
    if m is None:
        m = toggle(m1, [c for i in chosen for c in bundles[i].cycles])
    return RoundResult(m, retry_cap, dev, False, chosen)


# -- convex combinations -------------------------------------------------------


@dataclass
class ConvexCombination:
    matchings: list
    weights: list  # positive Fractions summing to 1
    vectors: list  # v(M) per matching, integer tuples

    @property
    def support(self):
        return len(self.matchings)

    def weighted_sum(self):
        k = len(self.vectors[0]) if self.vectors else 0
        return tuple(sum((w * v[i] for w, v in zip(self.weights, self.vectors)), Fraction(0))
                     for i in range(k))

    def is_valid(self):
        return (bool(self.weights) and all(w > 0 for w in self.weights)
                and sum(self.weights) == 1 and all(x == 0 for x in self.weighted_sum()))


def hull_weights(vectors):
    """Exact convex weights (Fractions) putting the origin in the hull of ``vectors``, or None."""
    k = len(vectors[0])
    A = [[v[i] for v in vectors] for i in range(k)] + [[1] * len(vectors)]
    b = [0] * k + [1]
    return feasible_point(A, b)


def certify_origin(g, n, matchings, sample_budget=0, rng=None):
    """Exact convex weights on (a subset of) ``matchings`` with weighted v-sum zero.

    Matchings with equal color vectors are merged before solving.  If the origin
    is not in the hull of the inputs, up to ``sample_budget`` further RPM samples
    are added (doubling batches) before giving up with HullCertificateError.
    """
    check_order(g, n)
    pool = list(matchings)
    if not pool:
        raise ValueError("need at least one matching")
    extra = 0
    reps = {}
    pending = pool
    while True:
        for m in pending:
            reps.setdefault(vec(g, m, n), m)
        zero = (0,) * g.num_colors
        if zero in reps:
            return ConvexCombination([reps[zero]], [Fraction(1)], [zero])
        keys = list(reps)
        w = hull_weights(keys)
        if w is not None:
            idx = [j for j, x in enumerate(w) if x > 0]
            return ConvexCombination([reps[keys[j]] for j in idx], [w[j] for j in idx],
                                     [keys[j] for j in idx])
        if extra >= sample_budget:
            raise HullCertificateError(
                f"origin not certified in the hull of {len(keys)} distinct vectors "
                f"after {extra} extra samples")
        if rng is None:
            rng = np.random.default_rng()
        batch = min(max(len(pool), 1), sample_budget - extra)
        pending = [rpm_sample(g.order, rng) for _ in range(batch)]
        extra += batch


def caratheodory_reduce(cc, k):
    """Shrink the support to at most k+1 keeping the combination exact.

    Identical matchings are merged; then, while the support exceeds k+1, an
    affine dependency among the vectors is used to shift weight until one
    weight hits zero.
    """
    if cc.support <= k + 1:
        return cc
    merged = {}
    for m, w, v in zip(cc.matchings, cc.weights, cc.vectors):
        if m in merged:
            merged[m][0] += w
        else:
            merged[m] = [w, v]
    mats = list(merged)
    weights = [merged[m][0] for m in mats]
    vectors = [merged[m][1] for m in mats]
    while len(mats) > k + 1:
        A = [[v[i] for v in vectors] for i in range(k)] + [[1] * len(vectors)]
        lam = null_vector(A)
        if lam is None:  # impossible: more columns than rows
            raise ConsistencyError("no affine dependency among > k+1 points")
        if not any(x > 0 for x in lam):
            lam = [-x for x in lam]
        theta = min(w / x for w, x in zip(weights, lam) if x > 0)
        weights = [w - theta * x for w, x in zip(weights, lam)]
        keep = [j for j, w in enumerate(weights) if w > 0]
        mats = [mats[j] for j in keep]
        weights = [weights[j] for j in keep]
        vectors = [vectors[j] for j in keep]
    return ConvexCombination(mats, weights, vectors)


# -- the k-stage merge ---------------------------------------------------------


@dataclass
class StageRecord:
    p: Fraction
    bundles: int
    attempts: int
    accepted: bool
    rounding_deviation: Fraction
    stage_deviation: Fraction  # || x_{i+1} - x_i ||_1


@dataclass
class RoundingTrace:
    k: int
    n: int
    stage_vectors: list = field(default_factory=list)  # x_1 .. x_s
    stages: list = field(default_factory=list)
    stage_bound: float = 0.0
    final_bound: float = 0.0
    guarantee_applies: bool = True

    @property
    def retries(self):
        return [s.attempts for s in self.stages]

    @property
    def exhausted(self):
        return any(not s.accepted for s in self.stages)

    def to_dict(self):
        return {
            "k": self.k,
            "n": self.n,
            "stage_bound": self.stage_bound,
            "final_bound": self.final_bound,
            "guarantee_applies": self.guarantee_applies,
            "stage_vectors": [[str(a) for a in x] for x in self.stage_vectors],
            "stages": [
                {"p": str(s.p), "bundles": s.bundles, "attempts": s.attempts,
                 "accepted": s.accepted, "rounding_deviation": str(s.rounding_deviation),
                 "stage_deviation": str(s.stage_deviation)}
                for s in self.stages
            ],
        }


def theorem3_pipeline(g, n, cc, rng, retry_cap=RETRY_CAP, checked=True):
    """Merge a zero-sum convex combination into one matching.

    Stage i replaces M_[i] and M_{i+1} (weights S_i = p_1+..+p_i and p_{i+1})
    by one matching M_[i+1], obtained by rounding the bundles between M_[i] and
    M_{i+1}' with p = S_i / S_{i+1}.  A draw is accepted only when both the
    rounding deviation and the resulting step ||x_{i+1} - x_i||_1 are within
    :func:`lemma3_bound`.

    Returns ``(matching, RoundingTrace)``.
    """
    check_order(g, n)
    k = g.num_colors
    if not cc.is_valid():
        raise ValueError("convex combination is not a valid zero-sum certificate")
    if cc.support > k + 1:
        cc = caratheodory_reduce(cc, k)
    trace = RoundingTrace(k, n, stage_bound=lemma3_bound(k, n),
                          final_bound=theorem3_bound(k, n), guarantee_applies=k >= 4)
    if k < 4:
        log_.warning("k=%d < 4: running the pipeline without the imbalance guarantee", k)
    mats, ws, vs = cc.matchings, cc.weights, cc.vectors
    s = len(mats)

    def x_vector(S, v_cur, j):
        # S v(M_[j]) + sum_{l >= j+1} p_l v(M_l), 0-based j
        out = [S * a for a in v_cur]
        for l in range(j + 1, s):
            for i in range(k):
                out[i] += ws[l] * vs[l][i]
        return tuple(out)

    cur = mats[0]
    v_cur = vs[0]
    S = ws[0]
    x = x_vector(S, v_cur, 0)
    trace.stage_vectors.append(x)
    for j in range(1, s):
        S_next = S + ws[j]
        p = S / S_next
        m2p, bundles = split_and_group(g, cur, mats[j], n, checked=checked)

        def accept(m, v, S_next=S_next, j=j, x=x):
            x_new = x_vector(S_next, v, j)
            return norm1(a - b for a, b in zip(x_new, x)) <= trace.stage_bound

        res = round_bundles(g, cur, bundles, p, n, rng, retry_cap, accept=accept)
        v_new = vec(g, res.matching, n)
        x_new = x_vector(S_next, v_new, j)
        trace.stages.append(StageRecord(
            p, len(bundles), res.attempts, res.accepted, res.deviation,
            norm1(a - b for a, b in zip(x_new, x))))
        trace.stage_vectors.append(x_new)
        cur, v_cur, S, x = res.matching, v_new, S_next, x_new
    return cur, trace
