"""Exact phase-1 simplex over Fractions, with Bland's rule.

Only feasibility is needed here: find ``w >= 0`` with ``A w = b`` for small
row counts.  Every pivot is exact, so a returned point satisfies the system
with no tolerance.
"""

from fractions import Fraction


def feasible_point(A, b):
    """Return a basic feasible solution of ``A w = b, w >= 0`` or None.

    ``A`` is a list of rows (ints or Fractions), ``b`` a list of right-hand
    sides.  The result is a list of Fractions with at most ``len(A)`` nonzeros.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    # make b >= 0
    T = []
    for r in range(rows):
        sign = -1 if b[r] < 0 else 1
        row = [Fraction(sign * a) for a in A[r]]
        row += [Fraction(int(r == s)) for s in range(rows)]
        row.append(Fraction(sign * b[r]))
        T.append(row)
    width = cols + rows
    basis = [cols + r for r in range(rows)]
    # phase-1 objective: minimize the sum of artificials, reduced costs -sum(rows)
    z = [-sum((T[r][j] for r in range(rows)), Fraction(0)) for j in range(width + 1)]
    for r in range(rows):
        z[cols + r] = Fraction(0)

    while True:
        enter = next((j for j in range(width) if z[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for r in range(rows):
            a = T[r][enter]
            if a > 0:
                ratio = T[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:  # cannot happen in phase 1 (objective bounded below by 0)
            raise RuntimeError("unbounded phase-1 problem")
        _pivot(T, z, leave, enter)
        basis[leave] = enter

    if z[-1] != 0:
        return None
    w = [Fraction(0)] * cols
    for r, j in enumerate(basis):
        if j < cols:
            w[j] = T[r][-1]
    return w


def _pivot(T, z, r, c):
    piv = T[r][c]
    row = [a / piv for a in T[r]]
    T[r] = row
    for s in range(len(T)):
        if s != r and T[s][c] != 0:
            f = T[s][c]
            T[s] = [a - f * b for a, b in zip(T[s], row)]
    if z[c] != 0:
        f = z[c]
        z[:] = [a - f * b for a, b in zip(z, row)]


def null_vector(A):
    """A nonzero rational vector ``x`` with ``A x = 0``, or None if only the zero vector."""
    rows = [[Fraction(a) for a in row] for row in A]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [a * inv for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = next((c for c in range(ncols) if c not in pivots), None)
    if free is None:
        return None
    x = [Fraction(0)] * ncols
    x[free] = Fraction(1)
    for i, c in enumerate(pivots):
        x[c] = -rows[i][free]
    return x
