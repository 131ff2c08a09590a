import logging
from fractions import Fraction

import numpy as np
import pytest

from chromatch.graph import PerfectMatching
from chromatch.instances import random_balanced
from chromatch.oracle import min_f
from chromatch.rounding import (
    AlternatingCycle,
    ConsistencyError,
    ConvexCombination,
    alternating_cycles,
    caratheodory_reduce,
    ceil_sqrt,
    certify_origin,
    check_split,
    cut_cycle,
    hull_weights,
    lemma3_bound,
    norm1,
    round_bundles,
    split_and_group,
    theorem3_bound,
    theorem3_pipeline,
    toggle,
    vec,
)
from chromatch.sampler import rpm_sample


def ring_pair(N):
    m1 = PerfectMatching.from_pairs([(i, i + 1) for i in range(0, N, 2)])
    m2 = PerfectMatching.from_pairs([(i, (i + 1) % N) for i in range(1, N, 2)])
    return m1, m2


def test_ceil_sqrt():
    assert [ceil_sqrt(x) for x in (1, 2, 4, 5, 36, 37)] == [1, 2, 2, 3, 6, 7]


def test_bounds():
    assert lemma3_bound(4, 9) == pytest.approx(13 * 4 ** 1.75 * 9 ** 0.75 * np.sqrt(np.log(8)))
    assert theorem3_bound(4, 9) == pytest.approx(4 * lemma3_bound(4, 9))


def test_cycles_of_identical_matchings():
    m = PerfectMatching.from_pairs([(0, 1), (2, 3)])
    assert alternating_cycles(m, m) == []
    assert toggle(m, []) == m


def test_single_four_cycle():
    m1 = PerfectMatching.from_pairs([(0, 1), (2, 3)])
    m2 = PerfectMatching.from_pairs([(1, 2), (0, 3)])
    (cyc,) = alternating_cycles(m1, m2)
    assert cyc.vertices == (0, 1, 2, 3)
    assert cyc.m1_edges == [(0, 1), (2, 3)]
    assert cyc.other_edges == [(1, 2), (3, 0)]
    assert toggle(m1, [cyc]) == m2


def test_order_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        alternating_cycles(PerfectMatching.from_pairs([(0, 1)]),
                           PerfectMatching.from_pairs([(0, 1), (2, 3)]))


def test_cycles_cover_symmetric_difference(rng):
    for _ in range(50):
        m1, m2 = rpm_sample(40, rng), rpm_sample(40, rng)
        cycles = alternating_cycles(m1, m2)
        edges = set()
        for c in cycles:
            assert c.vertices[0] == min(c.vertices)
            for u, v in c.m1_edges + c.other_edges:
                edges.add((min(u, v), max(u, v)))
        assert edges == set(m1.pairs) ^ set(m2.pairs)
        assert toggle(m1, cycles) == m2


def test_split_four_cycle_trivial():
    g = random_balanced(2, 1, 0)
    m1 = PerfectMatching.from_pairs([(0, 1), (2, 3)])
    m2 = PerfectMatching.from_pairs([(1, 2), (0, 3)])
    m2p, bundles = split_and_group(g, m1, m2, 1)
    assert m2p == m2
    assert len(bundles) == 1
    assert bundles[0].delta == tuple(a - b for a, b in zip(vec(g, m2, 1), vec(g, m1, 1)))


def test_split_long_ring():
    # one alternating cycle through all 72 vertices: 36 M1 edges, kn = 36
    g = random_balanced(4, 9, 3)
    m1, m2 = ring_pair(72)
    m2p, bundles = split_and_group(g, m1, m2, 9)
    assert sorted(b.m1_edge_count for b in bundles) == [9, 9, 9, 9]
    assert m2p != m2
    checks = check_split(g, m1, m2, m2p, bundles, 9)
    assert all(checks.values())


def test_cut_forty_edges():
    verts = tuple(range(80))
    pieces = cut_cycle(AlternatingCycle(verts), 36)
    assert [p.m1_count for p in pieces] == [10, 10, 10, 10]
    assert [v for p in pieces for v in p.vertices] == list(verts)


def test_cut_short_cycle_untouched():
    cyc = AlternatingCycle(tuple(range(20)))
    assert cut_cycle(cyc, 36) == [cyc]


@pytest.mark.parametrize("k,n", [(2, 3), (3, 4), (4, 5), (6, 2)])
def test_split_random_pairs(k, n, rng):
    g = random_balanced(k, n, k * n)
    for _ in range(20):
        m1, m2 = rpm_sample(g.order, rng), rpm_sample(g.order, rng)
        m2p, bundles = split_and_group(g, m1, m2, n)
        assert all(check_split(g, m1, m2, m2p, bundles, n).values())
        total = tuple(sum(b.delta[i] for b in bundles) for i in range(k))
        assert tuple(a + t for a, t in zip(vec(g, m1, n), total)) == vec(g, m2p, n)


def test_check_split_detects_bad_delta(rng):
    g = random_balanced(3, 2, 0)
    m1, m2 = rpm_sample(12, rng), rpm_sample(12, rng)
    while m1 == m2:
        m2 = rpm_sample(12, rng)
    m2p, bundles = split_and_group(g, m1, m2, 2)
    bundles[0].delta = tuple(x + 1 for x in bundles[0].delta)
    assert not check_split(g, m1, m2, m2p, bundles, 2)["delta_recomputed"]


def test_consistency_error_raised(monkeypatch, rng):
    import chromatch.rounding as rounding

    g = random_balanced(3, 2, 0)
    monkeypatch.setattr(rounding, "check_split", lambda *a: {"ii_vector_shift": False})
    with pytest.raises(ConsistencyError, match="ii_vector_shift"):
        split_and_group(g, rpm_sample(12, rng), rpm_sample(12, rng), 2)


def _bundled(k, n, seed):
    g = random_balanced(k, n, seed)
    rng = np.random.default_rng(seed)
    m1, m2 = rpm_sample(g.order, rng), rpm_sample(g.order, rng)
    m2p, bundles = split_and_group(g, m1, m2, n)
    return g, m1, m2p, bundles


def test_round_endpoints():
    g, m1, m2p, bundles = _bundled(4, 3, 5)
    a = round_bundles(g, m1, bundles, 1, 3, np.random.default_rng(0))
    assert a.matching == m1 and a.deviation == 0 and a.chosen == []
    b = round_bundles(g, m1, bundles, 0, 3, np.random.default_rng(0))
    assert b.matching == m2p and b.deviation == 0
    assert b.chosen == list(range(len(bundles)))


def test_round_rejects_bad_p():
    g, m1, _, bundles = _bundled(3, 2, 1)
    with pytest.raises(ValueError):
        round_bundles(g, m1, bundles, Fraction(3, 2), 2, np.random.default_rng(0))


def test_round_vector_identity():
    g, m1, _, bundles = _bundled(5, 4, 2)
    rng = np.random.default_rng(2)
    v1 = vec(g, m1, 4)
    for p in (Fraction(1, 4), Fraction(1, 2), Fraction(2, 3)):
        res = round_bundles(g, m1, bundles, p, 4, rng)
        expect = tuple(v1[i] + sum(bundles[j].delta[i] for j in res.chosen) for i in range(5))
        assert vec(g, res.matching, 4) == expect
        assert res.accepted and res.deviation <= lemma3_bound(5, 4)


def test_round_accept_predicate_exhausts():
    g, m1, _, bundles = _bundled(4, 2, 3)
    res = round_bundles(g, m1, bundles, Fraction(1, 2), 2, np.random.default_rng(0),
                        retry_cap=6, accept=lambda m, v: False)
    assert not res.accepted and res.attempts == 6


def test_hull_weights_antipodal():
    assert hull_weights([(1, -1), (-1, 1)]) == [Fraction(1, 2), Fraction(1, 2)]
    assert hull_weights([(1, 0), (2, 0)]) is None


def test_certify_zero_vector_shortcut():
    g = random_balanced(2, 2, 0)
    m = min_f(g, 2).witness
    cc = certify_origin(g, 2, [rpm_sample(8, np.random.default_rng(1)), m])
    assert cc.support == 1 and cc.weights == [1] and cc.matchings == [m]


def test_certify_k4_n3():
    g = random_balanced(4, 3, 0)
    rng = np.random.default_rng(0)
    cc = certify_origin(g, 3, [rpm_sample(24, rng) for _ in range(200)])
    assert cc.is_valid()
    assert cc.support <= 5
    assert all(vec(g, m, 3) == v for m, v in zip(cc.matchings, cc.vectors))


def test_certify_fails_on_one_sided_pool():
    from chromatch.instances import HullCertificateError

    g = random_balanced(3, 2, 0)
    rng = np.random.default_rng(0)
    pool = [m for m in (rpm_sample(12, rng) for _ in range(300)) if vec(g, m, 2)[0] > 0][:5]
    with pytest.raises(HullCertificateError):
        certify_origin(g, 2, pool)
    cc = certify_origin(g, 2, pool, sample_budget=200, rng=rng)
    assert cc.is_valid()


def test_caratheodory_small_support_unchanged():
    g = random_balanced(4, 3, 0)
    rng = np.random.default_rng(0)
    cc = certify_origin(g, 3, [rpm_sample(24, rng) for _ in range(200)])
    assert caratheodory_reduce(cc, 4) is cc


def test_caratheodory_merges_copies():
    g = random_balanced(3, 2, 0)
    m = rpm_sample(12, np.random.default_rng(0))
    v = vec(g, m, 2)
    cc = ConvexCombination([m] * 6, [Fraction(1, 6)] * 6, [v] * 6)
    out = caratheodory_reduce(cc, 3)
    assert out.matchings == [m] and out.weights == [1]


def test_caratheodory_mixed_certificates():
    k, n = 5, 2
    g = random_balanced(k, n, 4)
    rng = np.random.default_rng(4)
    zero = (0,) * k
    parts = []
    for _ in range(3):
        pool = [m for m in (rpm_sample(g.order, rng) for _ in range(100)) if vec(g, m, n) != zero]
        parts.append(certify_origin(g, n, pool))
    cc = ConvexCombination(
        [m for c in parts for m in c.matchings],
        [w / 3 for c in parts for w in c.weights],
        [v for c in parts for v in c.vectors],
    )
    assert cc.is_valid() and cc.support > k + 1
    out = caratheodory_reduce(cc, k)
    assert out.support <= k + 1
    assert out.is_valid()


def test_pipeline_single_matching():
    g = random_balanced(2, 2, 0)
    m = min_f(g, 2).witness
    cc = ConvexCombination([m], [Fraction(1)], [vec(g, m, 2)])
    out, trace = theorem3_pipeline(g, 2, cc, np.random.default_rng(0))
    assert out == m and trace.stages == []


def test_pipeline_rejects_invalid():
    g = random_balanced(4, 2, 0)
    m = rpm_sample(16, np.random.default_rng(0))
    cc = ConvexCombination([m], [Fraction(1)], [vec(g, m, 2)])
    if vec(g, m, 2) != (0,) * 4:
        with pytest.raises(ValueError):
            theorem3_pipeline(g, 2, cc, np.random.default_rng(0))


@pytest.mark.parametrize("k,n,seed", [(4, 3, 0), (5, 2, 1), (4, 5, 2)])
def test_pipeline_bound(k, n, seed):
    g = random_balanced(k, n, seed)
    rng = np.random.default_rng(seed)
    cc = certify_origin(g, n, [rpm_sample(g.order, rng) for _ in range(200)])
    out, trace = theorem3_pipeline(g, n, cc, rng)
    assert trace.guarantee_applies
    assert len(trace.stages) == cc.support - 1
    assert not trace.exhausted
    assert all(s.stage_deviation <= trace.stage_bound for s in trace.stages)
    assert norm1(vec(g, out, n)) <= theorem3_bound(k, n)
    assert trace.stage_vectors[-1] == tuple(Fraction(x) for x in vec(g, out, n))
    d = trace.to_dict()
    assert len(d["stages"]) == len(trace.stages)


def test_pipeline_small_k_warns(caplog):
    g = random_balanced(3, 2, 0)
    rng = np.random.default_rng(0)
    cc = certify_origin(g, 2, [rpm_sample(12, rng) for _ in range(100)])
    with caplog.at_level(logging.WARNING):
        _, trace = theorem3_pipeline(g, 2, cc, rng)
    assert not trace.guarantee_applies
    assert "k=3" in caplog.text
