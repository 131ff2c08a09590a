from collections import Counter
from math import log, sqrt

import numpy as np
import pytest
from conftest import all_pairings

from chromatch.graph import PerfectMatching, matching_counts
from chromatch.instances import figure1_instance, random_balanced
from chromatch.sampler import rpm_bound, rpm_draws, rpm_sample, sample_until_bound

# chi-square 0.999 quantiles, checked against scipy.stats.chi2.ppf
CHI2_999 = {2: 13.8155, 14: 36.1233}


def test_chi2_table():
    from scipy.stats import chi2

    for df, crit in CHI2_999.items():
        assert chi2.ppf(0.999, df) == pytest.approx(crit, abs=1e-4)


def test_n2_single_choice(backend):
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert rpm_sample(2, rng).pairs == ((0, 1),)


def test_odd_order_rejected():
    with pytest.raises(ValueError):
        rpm_sample(5, np.random.default_rng(0))


def test_draw_ranges():
    d = rpm_draws(10, np.random.default_rng(1))
    assert len(d) == 5
    assert all(0 <= x < 9 - 2 * t for t, x in enumerate(d))


def test_pairs_least_vertex_first():
    # the first pair always contains vertex 0
    rng = np.random.default_rng(3)
    for _ in range(100):
        assert rpm_sample(12, rng).partner[0] != 0


def test_deterministic_given_rng(backend):
    a = rpm_sample(40, np.random.default_rng(17))
    b = rpm_sample(40, np.random.default_rng(17))
    assert a == b


def test_backends_agree():
    from chromatch import _pykernels, kernels

    if kernels.compiled is None:
        pytest.skip("compiled kernels not built")
    for seed in range(50):
        draws = rpm_draws(30, np.random.default_rng(seed))
        p1 = np.empty(30, dtype=np.int32)
        p2 = np.empty(30, dtype=np.int32)
        _pykernels.rpm_fill(draws, p1)
        kernels.compiled.rpm_fill(draws, p2)
        assert np.array_equal(p1, p2)


def test_n4_window():
    rng = np.random.default_rng(2024)
    hist = Counter(rpm_sample(4, rng).pairs for _ in range(30000))
    assert len(hist) == 3
    assert all(9500 <= c <= 10500 for c in hist.values())


def test_n6_chi_square():
    rng = np.random.default_rng(6)
    cats = {PerfectMatching.from_pairs(p).pairs: 0 for p in all_pairings(range(6))}
    assert len(cats) == 15
    total = 150_000
    for _ in range(total):
        cats[rpm_sample(6, rng).pairs] += 1
    exp = total / 15
    stat = sum((c - exp) ** 2 / exp for c in cats.values())
    assert stat < CHI2_999[14]


def test_mean_color_count_is_n():
    k, n, T = 4, 5, 2000
    g = random_balanced(k, n, 8)
    rng = np.random.default_rng(8)
    counts = np.array([matching_counts(g, rpm_sample(g.order, rng)) for _ in range(T)])
    tol = 4 * sqrt(k * n) / sqrt(T) * sqrt(k * n)
    assert np.all(np.abs(counts.mean(axis=0) - n) <= tol)


def test_bound_formula():
    assert rpm_bound(3, 1) == pytest.approx(9 * sqrt(3 * log(6)))
    assert 20.8 < rpm_bound(3, 1) < 20.9


def test_until_bound_k1():
    g = random_balanced(1, 5, 0)
    res = sample_until_bound(g, 5, rng=np.random.default_rng(0))
    assert res.attempts == 1 and res.f == 0 and not res.exhausted


def test_until_bound_figure1():
    res = sample_until_bound(figure1_instance(), 1, rng=np.random.default_rng(0))
    assert res.attempts == 1
    assert res.f <= 4


def test_until_bound_k4_n25_first_attempt():
    g = random_balanced(4, 25, 1)
    rng = np.random.default_rng(1)
    firsts = sum(sample_until_bound(g, 25, rng=rng).attempts == 1 for _ in range(1000))
    assert firsts >= 990


def test_until_bound_reports_exhaustion():
    # an instance/n pair where the bound cannot be met: fake a tiny bound via monkeypatch
    import chromatch.sampler as sampler

    g = random_balanced(3, 2, 0)
    orig = sampler.rpm_bound
    try:
        sampler.rpm_bound = lambda k, n: -1
        res = sample_until_bound(g, 2, budget=7, rng=np.random.default_rng(0))
    finally:
        sampler.rpm_bound = orig
    assert res.exhausted and res.attempts == 7
