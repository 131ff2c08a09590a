# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the loops in ``_pykernels``; same signatures, same results."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


def rpm_fill(const long long[:] draws, int[:] partner):
    cdef Py_ssize_t N = partner.shape[0]
    cdef int *live = <int *> malloc(N * sizeof(int))
    cdef int *pos = <int *> malloc(N * sizeof(int))
    cdef char *removed = <char *> malloc(N)
    cdef Py_ssize_t size = N, cursor = 0, t = 0, i
    cdef int x, y, last
    if live == NULL or pos == NULL or removed == NULL:
        free(live); free(pos); free(removed)
        raise MemoryError()
    with nogil:
        for i in range(N):
            live[i] = <int> i
            pos[i] = <int> i
            removed[i] = 0
        while size > 0:
            while removed[cursor]:
                cursor += 1
            x = <int> cursor
            size -= 1
            last = live[size]
            live[pos[x]] = last
            pos[last] = pos[x]
            removed[x] = 1
            y = live[draws[t]]
            size -= 1
            last = live[size]
            live[pos[y]] = last
            pos[last] = pos[y]
            removed[y] = 1
            partner[x] = y
            partner[y] = x
            t += 1
    free(live); free(pos); free(removed)


def color_counts(const signed char[:, :] colmat, const int[:] partner, int k):
    counts = np.zeros(k, dtype=np.int64)
    cdef long long[:] cv = counts
    cdef Py_ssize_t u
    cdef int v
    with nogil:
        for u in range(partner.shape[0]):
            v = partner[u]
            if u < v:
                cv[colmat[u, v]] += 1
    return counts


cdef inline long long _step(long long *cnt, int c, int s, long long n) noexcept nogil:
    cdef long long before = cnt[c] - n
    if before < 0:
        before = -before
    cnt[c] += s
    cdef long long after = cnt[c] - n
    if after < 0:
        after = -after
    return after - before


cdef inline long long _move_delta(const signed char[:, :] cm, long long *cnt, long long n,
                                  int u, int v, int x, int y, int a, int b) noexcept nogil:
    cdef int c1 = cm[u, v], c2 = cm[x, y], c3 = cm[u, a], c4 = cm[v, b]
    cdef long long d = _step(cnt, c1, -1, n)
    d += _step(cnt, c2, -1, n)
    d += _step(cnt, c3, 1, n)
    d += _step(cnt, c4, 1, n)
    cnt[c1] += 1
    cnt[c2] += 1
    cnt[c3] -= 1
    cnt[c4] -= 1
    return d


cdef long long *_copy_counts(const long long[:] counts) except NULL:
    cdef Py_ssize_t k = counts.shape[0], i
    cdef long long *cnt = <long long *> malloc((k if k > 0 else 1) * sizeof(long long))
    if cnt == NULL:
        raise MemoryError()
    for i in range(k):
        cnt[i] = counts[i]
    return cnt


def swap_delta(const signed char[:, :] colmat, const long long[:] counts, long long n,
               int u, int v, int x, int y, int mode):
    cdef long long *cnt = _copy_counts(counts)
    cdef long long d
    if mode == 0:
        d = _move_delta(colmat, cnt, n, u, v, x, y, x, y)
    else:
        d = _move_delta(colmat, cnt, n, u, v, x, y, y, x)
    free(cnt)
    return d


def swap_scan(const signed char[:, :] colmat, const int[:] eu, const int[:] ev,
              const long long[:] counts, long long n):
    cdef long long *cnt = _copy_counts(counts)
    cdef Py_ssize_t m = eu.shape[0], i, j
    cdef int u, v, x, y, mode
    cdef int bi = -1, bj = -1, bm = -1
    cdef long long best = 0, d, zeros = 0
    with nogil:
        for i in range(m):
            u = eu[i]
            v = ev[i]
            for j in range(i + 1, m):
                x = eu[j]
                y = ev[j]
                for mode in range(2):
                    if mode == 0:
                        d = _move_delta(colmat, cnt, n, u, v, x, y, x, y)
                    else:
                        d = _move_delta(colmat, cnt, n, u, v, x, y, y, x)
                    if d < best:
                        best = d
                        bi = <int> i
                        bj = <int> j
                        bm = mode
                    elif d == 0:
                        zeros += 1
    free(cnt)
    return bi, bj, bm, best, zeros


def nth_zero_swap(const signed char[:, :] colmat, const int[:] eu, const int[:] ev,
                  const long long[:] counts, long long n, long long r):
    cdef long long *cnt = _copy_counts(counts)
    cdef Py_ssize_t m = eu.shape[0], i, j
    cdef int u, v, x, y, mode
    cdef int ri = -1, rj = -1, rm = -1
    cdef long long d
    with nogil:
        for i in range(m):
            u = eu[i]
            v = ev[i]
            for j in range(i + 1, m):
                x = eu[j]
                y = ev[j]
                for mode in range(2):
                    if mode == 0:
                        d = _move_delta(colmat, cnt, n, u, v, x, y, x, y)
                    else:
                        d = _move_delta(colmat, cnt, n, u, v, x, y, y, x)
                    if d == 0:
                        if r == 0:
                            ri = <int> i
                            rj = <int> j
                            rm = mode
                            break
                        r -= 1
                if ri >= 0:
                    break
            if ri >= 0:
                break
    free(cnt)
    if ri < 0:
        raise IndexError("fewer zero-delta moves than requested")
    return ri, rj, rm


def enumerate_stats(const signed char[:, :] colmat, int N, int k, long long n):
    cdef int *partner = <int *> malloc(N * sizeof(int))
    cdef int *choice = <int *> malloc(N * sizeof(int))   # y chosen at depth
    cdef int *first = <int *> malloc(N * sizeof(int))    # x at depth
    cdef long long *counts = <long long *> malloc(k * sizeof(long long))
    cdef long long *sums = <long long *> malloc(k * sizeof(long long))
    witness = np.empty(N, dtype=np.int32)
    cdef int[:] wv = witness
    cdef long long best = -1, nmin = 0, total = 0, f, dv
    cdef int depth, x, y, i, half = N // 2
    if partner == NULL or choice == NULL or first == NULL or counts == NULL or sums == NULL:
        free(partner); free(choice); free(first); free(counts); free(sums)
        raise MemoryError()
    with nogil:
        for i in range(N):
            partner[i] = -1
        for i in range(k):
            counts[i] = 0
            sums[i] = 0
        depth = 0
        first[0] = 0
        choice[0] = 0   # choice == first means no partner tried yet
        while depth >= 0:
            x = first[depth]
            y = choice[depth]
            if y != x:
                partner[x] = -1
                partner[y] = -1
                counts[colmat[x, y]] -= 1
            y += 1
            while y < N and partner[y] >= 0:
                y += 1
            if y >= N:
                depth -= 1
                continue
            choice[depth] = y
            partner[x] = y
            partner[y] = x
            counts[colmat[x, y]] += 1
            if depth == half - 1:
                f = 0
                for i in range(k):
                    dv = counts[i] - n
                    f += dv if dv >= 0 else -dv
                    sums[i] += counts[i]
                total += 1
                if best < 0 or f < best:
                    best = f
                    nmin = 1
                    for i in range(N):
                        wv[i] = partner[i]
                elif f == best:
                    nmin += 1
                continue
            i = x + 1
            while partner[i] >= 0:
                i += 1
            depth += 1
            first[depth] = i
            choice[depth] = i
    sums_arr = np.empty(k, dtype=np.int64)
    for i in range(k):
        sums_arr[i] = sums[i]
    free(partner); free(choice); free(first); free(counts); free(sums)
    return best, witness, nmin, sums_arr, total
