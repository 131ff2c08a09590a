import numpy as np
import pytest
from hypothesis import settings

from chromatch import _pykernels, kernels

settings.register_profile("default", deadline=None)
settings.load_profile("default")

KERNEL_NAMES = ("rpm_fill", "color_counts", "swap_delta", "swap_scan", "nth_zero_swap",
                "enumerate_stats")

BACKENDS = ["python"] + (["cython"] if kernels.compiled is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    mod = _pykernels if request.param == "python" else kernels.compiled
    for name in KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(mod, name))
    return request.param


def brute_counts(g, pairs):
    counts = [0] * g.num_colors
    for u, v in pairs:
        counts[g.edge_color(u, v)] += 1
    return counts


def brute_f(g, pairs, n):
    return sum(abs(c - n) for c in brute_counts(g, pairs))


def all_pairings(items):
    """Every partition of ``items`` into pairs, independent of the package enumerator."""
    items = list(items)
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for p in all_pairings(rest):
            yield [(first, items[i])] + p


def pairs_after_swap(pairs, e1, e2, mode):
    (u, v), (x, y) = e1, e2
    new = [p for p in pairs if set(p) not in ({u, v}, {x, y})]
    if mode == 0:
        new += [(u, x), (v, y)]
    else:
        new += [(u, y), (v, x)]
    return new


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


_results = {}


def record_acceptance(name, ok, detail):
    _results[name] = (ok, detail)
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_results, key=lambda s: int(s.split(".")[0])):
        ok, detail = _results[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

