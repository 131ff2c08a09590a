"""Instance generation and the plain-text instance format.

File layout::

    # optional comment lines
    N k
    c c c ...   (C(N,2) colors in 1..k, edge-index order, 20 per line)
"""

import logging
from math import comb

import numpy as np

from .graph import MAX_EDGES, ColoredCompleteGraph

log = logging.getLogger(__name__)

TOKENS_PER_LINE = 20
HULL_ATTEMPTS = 100

# u_i -> i-1
FIGURE1_COLORS = (
    [(5, 4), (0, 4), (0, 1), (1, 3), (3, 4)],
    [(1, 2), (0, 3), (3, 5), (2, 4), (0, 5)],
    [(0, 2), (1, 4), (1, 5), (2, 3), (2, 5)],
)


class InstanceFormatError(ValueError):
    """Malformed instance file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HullCertificateError(RuntimeError):
    pass


def make_rng(seed):
    return np.random.default_rng(seed)


def random_balanced(k, n, seed):
    """Uniformly random coloring of K_{2kn} with n(2kn-1) edges per color."""
    if k < 1 or n < 1:
        raise ValueError(f"k and n must be positive, got k={k}, n={n}")
    N = 2 * k * n
    E = comb(N, 2)
    if E > MAX_EDGES:
        raise OverflowError(f"C({N},2) = {E} edges exceeds the supported {MAX_EDGES}")
    colors = np.repeat(np.arange(k, dtype=np.int8), n * (N - 1))
    rng = make_rng(seed)
    rng.shuffle(colors)
    return ColoredCompleteGraph(N, k, colors)


def figure1_instance():
    """K6 with three colors and no perfect matching using one edge of each."""
    return ColoredCompleteGraph.from_color_sets(6, FIGURE1_COLORS)


def unbalanced_hull_instance(k, n, seed, samples=200, max_attempts=HULL_ATTEMPTS):
    """An unbalanced coloring whose sampled matching vectors have the origin in their hull.

    Returns ``(graph, certificate)``.  Each attempt recolors a few random edges of
    a balanced coloring and asks :func:`chromatch.rounding.certify_origin` for an
    exact certificate over RPM samples.
    """
    from .rounding import certify_origin
    from .sampler import rpm_sample

    if k < 4:
        raise ValueError(f"unbalanced hull instances need k >= 4, got {k}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    base_seq = np.random.SeedSequence(seed)
    for attempt, child in enumerate(base_seq.spawn(max_attempts)):
        rng = np.random.default_rng(child)
        g = random_balanced(k, n, rng.integers(2**63))
        colors = g.edge_colors.copy()
        E = len(colors)
        flips = int(rng.integers(1, max(2, E // 50) + 1))
        for i in rng.choice(E, size=flips, replace=False):
            shift = int(rng.integers(1, k))
            colors[i] = (colors[i] + shift) % k
        h = ColoredCompleteGraph(g.order, k, colors)
        if h.is_balanced():
            continue
        matchings = [rpm_sample(h.order, rng) for _ in range(samples)]
        try:
            cert = certify_origin(h, n, matchings, sample_budget=0)
        except HullCertificateError:
            log.debug("attempt %d: no hull certificate", attempt)
            continue
        return h, cert
    raise HullCertificateError(
        f"no hull-certified unbalanced instance within {max_attempts} attempts")


def format_instance(g):
    lines = [f"{g.order} {g.num_colors}"]
    tokens = [str(int(c) + 1) for c in g.edge_colors]
    for i in range(0, len(tokens), TOKENS_PER_LINE):
        lines.append(" ".join(tokens[i:i + TOKENS_PER_LINE]))
    return "\n".join(lines) + "\n"


def write_instance(g, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_instance(g))


def parse_instance(text):
    header = None
    colors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if header is None:
            if len(toks) != 2:
                raise InstanceFormatError(f"malformed header {line!r}, expected 'N k'", lineno)
            try:
                N, k = int(toks[0]), int(toks[1])
            except ValueError:
                raise InstanceFormatError(f"malformed header {line!r}, expected 'N k'",
                                          lineno) from None
            if N < 2 or N % 2:
                raise InstanceFormatError(f"order N={N} must be even and >= 2", lineno)
            if k < 1:
                raise InstanceFormatError(f"number of colors k={k} must be positive", lineno)
            if comb(N, 2) > MAX_EDGES:
                raise InstanceFormatError(f"order N={N} too large", lineno)
            header = (N, k)
            continue
        for tok in toks:
            try:
                c = int(tok)
            except ValueError:
                raise InstanceFormatError(f"non-integer color {tok!r}", lineno) from None
            if not 1 <= c <= header[1]:
                raise InstanceFormatError(f"color {c} out of range 1..{header[1]}", lineno)
            colors.append(c - 1)
    if header is None:
        raise InstanceFormatError("missing header 'N k'")
    N, k = header
    expected = comb(N, 2)
    if len(colors) != expected:
        raise InstanceFormatError(
            f"expected {expected} edge colors for N={N}, found {len(colors)}")
    return ColoredCompleteGraph(N, k, np.array(colors, dtype=np.int8))


def read_instance(path):
    with open(path, encoding="ascii") as fh:
        return parse_instance(fh.read())

