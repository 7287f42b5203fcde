# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled agglomeration kernels.

Same contract and arithmetic as the pure-numpy backend (_agglo_py): raw
chronological merges over slot representatives.  Built with fp-contract
off so results track the fallback bit for bit.
"""

from libc.math cimport INFINITY, isfinite

import numpy as np


cdef inline void _fill_square(double[:, ::1] m, const double[::1] d, Py_ssize_t n) noexcept:
    cdef Py_ssize_t i, j, k = 0
    for i in range(n):
        m[i, i] = INFINITY
    for i in range(n - 1):
        for j in range(i + 1, n):
            m[i, j] = d[k]
            m[j, i] = d[k]
            k += 1


cdef inline void _merge_slots(double[:, ::1] m, double[::1] w, unsigned char[::1] active,
                              Py_ssize_t i, Py_ssize_t j, double d_ab, Py_ssize_t n) noexcept:
    # Lance-Williams update folding slot j into slot i; clamp at d_ab since
    # exact arithmetic forbids the merged measure dropping below it
    cdef Py_ssize_t r
    cdef double wa = w[i], wb = w[j], wr, nv
    for r in range(n):
        if r == i or r == j or not active[r]:
            continue
        wr = w[r]
        nv = ((wa + wr) * m[i, r] + (wb + wr) * m[j, r] - wr * d_ab) / (wa + wb + wr)
        if nv < d_ab:
            nv = d_ab
        m[i, r] = nv
        m[r, i] = nv
    w[i] = wa + wb
    active[j] = 0
    for r in range(n):
        m[j, r] = INFINITY
        m[r, j] = INFINITY


def naive_merge(delta, weights):
    """Greedy global-minimum agglomeration; ties by lowest contained leaf pair."""
    w_arr = np.array(weights, dtype=np.float64)
    cdef Py_ssize_t n = w_arr.shape[0]
    d_arr = np.ascontiguousarray(delta, dtype=np.float64)
    m_arr = np.empty((n, n), dtype=np.float64)
    active_arr = np.ones(n, dtype=np.uint8)
    minleaf_arr = np.arange(n, dtype=np.int64)
    rep_a = np.empty(n - 1, dtype=np.int64)
    rep_b = np.empty(n - 1, dtype=np.int64)
    heights = np.empty(n - 1, dtype=np.float64)
    mweights = np.empty(n - 1, dtype=np.float64)

    cdef double[:, ::1] m = m_arr
    cdef const double[::1] d = d_arr
    cdef double[::1] w = w_arr
    cdef unsigned char[::1] active = active_arr
    cdef long long[::1] minleaf = minleaf_arr
    cdef long long[::1] ra = rep_a
    cdef long long[::1] rb = rep_b
    cdef double[::1] hs = heights
    cdef double[::1] mw = mweights

    cdef Py_ssize_t step, i, j, bi, bj
    cdef double best, v
    cdef long long k1, k2, bk1, bk2, ml_i, ml_j

    _fill_square(m, d, n)
    for step in range(n - 1):
        best = INFINITY
        bi = -1
        bj = -1
        bk1 = 0
        bk2 = 0
        for i in range(n - 1):
            if not active[i]:
                continue
            for j in range(i + 1, n):
                if not active[j]:
                    continue
                v = m[i, j]
                if v > best:
                    continue
                ml_i = minleaf[i]
                ml_j = minleaf[j]
                if ml_i <= ml_j:
                    k1 = ml_i
                    k2 = ml_j
                else:
                    k1 = ml_j
                    k2 = ml_i
                if v < best or k1 < bk1 or (k1 == bk1 and k2 < bk2):
                    best = v
                    bi = i
                    bj = j
                    bk1 = k1
                    bk2 = k2
        if bi < 0 or not isfinite(best):
            raise FloatingPointError(
                f"non-finite aggregation value at merge step {step}"
            )
        ra[step] = bi
        rb[step] = bj
        hs[step] = best
        _merge_slots(m, w, active, bi, bj, best, n)
        mw[step] = w[bi]
        if minleaf[bj] < minleaf[bi]:
            minleaf[bi] = minleaf[bj]
    return rep_a, rep_b, heights, mweights


def nn_chain_merge(delta, weights):
    """Nearest-neighbor-chain agglomeration; chronological (unsorted) merges."""
    w_arr = np.array(weights, dtype=np.float64)
    cdef Py_ssize_t n = w_arr.shape[0]
    d_arr = np.ascontiguousarray(delta, dtype=np.float64)
    m_arr = np.empty((n, n), dtype=np.float64)
    active_arr = np.ones(n, dtype=np.uint8)
    chain_arr = np.empty(n, dtype=np.int64)
    rep_a = np.empty(n - 1, dtype=np.int64)
    rep_b = np.empty(n - 1, dtype=np.int64)
    heights = np.empty(n - 1, dtype=np.float64)
    mweights = np.empty(n - 1, dtype=np.float64)

    cdef double[:, ::1] m = m_arr
    cdef const double[::1] d = d_arr
    cdef double[::1] w = w_arr
    cdef unsigned char[::1] active = active_arr
    cdef long long[::1] chain = chain_arr
    cdef long long[::1] ra = rep_a
    cdef long long[::1] rb = rep_b
    cdef double[::1] hs = heights
    cdef double[::1] mw = mweights

    cdef Py_ssize_t step, i, j, x, y, c, chain_len = 0
    cdef double current, v, d_ab

    _fill_square(m, d, n)
    for step in range(n - 1):
        if chain_len == 0:
            for i in range(n):
                if active[i]:
                    chain[0] = i
                    break
            chain_len = 1
        while True:
            x = chain[chain_len - 1]
            # prefer the previous chain element on ties so mutual pairs close
            if chain_len > 1:
                y = chain[chain_len - 2]
                current = m[x, y]
            else:
                y = -1
                current = INFINITY
            for c in range(n):
                if c == x or not active[c]:
                    continue
                v = m[x, c]
                if v < current:
                    current = v
                    y = c
            if not isfinite(current):
                raise FloatingPointError(
                    f"non-finite aggregation value at merge step {step}"
                )
            if chain_len > 1 and y == chain[chain_len - 2]:
                break
            chain[chain_len] = y
            chain_len += 1
        chain_len -= 2
        if x < y:
            i = x
            j = y
        else:
            i = y
            j = x
        d_ab = m[i, j]
        ra[step] = i
        rb[step] = j
        hs[step] = d_ab
        _merge_slots(m, w, active, i, j, d_ab, n)
        mw[step] = w[i]
    return rep_a, rep_b, heights, mweights
