"""Pure-numpy agglomeration kernels (fallback backend).

Both kernels consume a condensed aggregation-measure array plus cluster
weights and emit raw merges: ``(rep_a, rep_b, heights, merged_weights)``
in chronological order.  ``rep_*`` are slot indices in ``0..n-1``; a merged
cluster keeps living in the smaller of its two slots, so a slot index always
names a cluster that contains that original observation.  Dendrogram
assembly (sorting, relabeling, child ordering) happens in ward_core and is
shared with the compiled backend.
"""

from __future__ import annotations

import numpy as np


def _square(delta: np.ndarray, n: int) -> np.ndarray:
    m = np.full((n, n), np.inf)
    iu = np.triu_indices(n, 1)
    m[iu] = delta
    m[iu[1], iu[0]] = delta
    return m


def _merge_slots(m, w, i, j, d_ab, active):
    """Lance-Williams update folding slot j into slot i."""
    r = np.flatnonzero(active)
    r = r[(r != i) & (r != j)]
    if r.size:
        wa, wb, wr = w[i], w[j], w[r]
        new = ((wa + wr) * m[i, r] + (wb + wr) * m[j, r] - wr * d_ab) / (wa + wb + wr)
        # exact arithmetic gives delta(AuB, D) >= delta(A, B) whenever A and B
        # are mutual nearest neighbors; clamp away rounding wobble so merge
        # heights can never reverse
        np.maximum(new, d_ab, out=new)
        m[i, r] = new
        m[r, i] = new
    w[i] = w[i] + w[j]
    active[j] = False
    m[j, :] = np.inf
    m[:, j] = np.inf


def naive_merge(delta, weights):
    """Greedy global-minimum agglomeration.

    Ties at the minimum are broken by the pair whose smaller contained
    original leaf index is lowest, then by the larger contained leaf index.
    """
    w = np.array(weights, dtype=np.float64)
    n = w.shape[0]
    m = _square(np.asarray(delta, dtype=np.float64), n)
    minleaf = np.arange(n)
    active = np.ones(n, dtype=bool)
    rep_a = np.empty(n - 1, dtype=np.int64)
    rep_b = np.empty(n - 1, dtype=np.int64)
    heights = np.empty(n - 1)
    mweights = np.empty(n - 1)
    for step in range(n - 1):
        d_min = m.min()
        if not np.isfinite(d_min):
            raise FloatingPointError(
                f"non-finite aggregation value at merge step {step}"
            )
        cand = np.argwhere(m == d_min)
        cand = cand[cand[:, 0] < cand[:, 1]]
        k1 = np.minimum(minleaf[cand[:, 0]], minleaf[cand[:, 1]])
        k2 = np.maximum(minleaf[cand[:, 0]], minleaf[cand[:, 1]])
        i, j = cand[np.lexsort((k2, k1))[0]]
        rep_a[step], rep_b[step] = i, j
        heights[step] = d_min
        _merge_slots(m, w, i, j, d_min, active)
        mweights[step] = w[i]
        minleaf[i] = min(minleaf[i], minleaf[j])
    return rep_a, rep_b, heights, mweights


def nn_chain_merge(delta, weights):
    """Nearest-neighbor-chain agglomeration (mutual-NN merges).

    Emits merges in chronological chain order; heights are generally not
    sorted.  Valid because the aggregation measure is reducible.
    """
    w = np.array(weights, dtype=np.float64)
    n = w.shape[0]
    m = _square(np.asarray(delta, dtype=np.float64), n)
    active = np.ones(n, dtype=bool)
    chain = np.empty(n, dtype=np.int64)
    chain_len = 0
    rep_a = np.empty(n - 1, dtype=np.int64)
    rep_b = np.empty(n - 1, dtype=np.int64)
    heights = np.empty(n - 1)
    mweights = np.empty(n - 1)
    for step in range(n - 1):
        if chain_len == 0:
            chain[0] = np.flatnonzero(active)[0]
            chain_len = 1
        while True:
            x = chain[chain_len - 1]
            # prefer the previous chain element on ties so mutual pairs close
            if chain_len > 1:
                y = chain[chain_len - 2]
                current = m[x, y]
            else:
                y = -1
                current = np.inf
            row = m[x]
            c = int(row.argmin())
            if row[c] < current:
                y, current = c, row[c]
            if not np.isfinite(current):
                raise FloatingPointError(
                    f"non-finite aggregation value at merge step {step}"
                )
            if chain_len > 1 and y == chain[chain_len - 2]:
                break
            chain[chain_len] = y
            chain_len += 1
        chain_len -= 2
        i, j = (x, y) if x < y else (y, x)
        d_ab = m[i, j]
        rep_a[step], rep_b[step] = i, j
        heights[step] = d_ab
        _merge_slots(m, w, i, j, d_ab, active)
        mweights[step] = w[i]
    return rep_a, rep_b, heights, mweights
