"""Numba kernels for the O(n^2) clustering inner loops.

These are the only pieces of the library where a plain numpy formulation is
either memory-hungry (materializing n x n distance matrices) or dominated by
Python-level loop overhead. Each kernel is sequential on purpose: process
level parallelism is handled by the caller, never inside a kernel.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def prim_mutual_reachability_mst(X, core_dists):
    """Prim's algorithm on the implicit mutual-reachability graph.

    Returns (edge_a, edge_b, edge_w): the n-1 MST edges in the order Prim
    adds them. Distance rows are computed lazily so memory stays O(n).
    """
    n, d = X.shape
    in_tree = np.zeros(n, dtype=np.bool_)
    best_w = np.full(n, np.inf)
    best_from = np.zeros(n, dtype=np.int64)
    edge_a = np.empty(n - 1, dtype=np.int64)
    edge_b = np.empty(n - 1, dtype=np.int64)
    edge_w = np.empty(n - 1, dtype=np.float64)
    current = 0
    in_tree[0] = True
    for step in range(n - 1):
        cc = core_dists[current]
        for j in range(n):
            if in_tree[j]:
                continue
            d2 = 0.0
            for c in range(d):
                diff = X[current, c] - X[j, c]
                d2 += diff * diff
            w = np.sqrt(d2)
            if core_dists[j] > w:
                w = core_dists[j]
            if cc > w:
                w = cc
            if w < best_w[j]:
                best_w[j] = w
                best_from[j] = current
        nxt = -1
        nw = np.inf
        for j in range(n):
            if not in_tree[j] and best_w[j] < nw:
                nw = best_w[j]
                nxt = j
        if nxt < 0:
            for j in range(n):
                if not in_tree[j]:
                    nxt = j
                    nw = np.inf
                    break
        edge_a[step] = best_from[nxt]
        edge_b[step] = nxt
        edge_w[step] = nw
        in_tree[nxt] = True
        current = nxt
    return edge_a, edge_b, edge_w


@njit(cache=True)
def optics_ordering(X, core_dists):
    """OPTICS processing order, reachability, and predecessors with an
    infinite radius.

    Next point = unprocessed point with the smallest reachability, ties
    broken by the smallest index; sweep starts keep reachability = inf.
    """
    n, d = X.shape
    processed = np.zeros(n, dtype=np.bool_)
    reach = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    out_reach = np.empty(n, dtype=np.float64)
    for step in range(n):
        best = -1
        bestr = np.inf
        for j in range(n):
            if processed[j]:
                continue
            if best < 0 or reach[j] < bestr:
                best = j
                bestr = reach[j]
        order[step] = best
        out_reach[step] = reach[best]
        processed[best] = True
        cc = core_dists[best]
        if not np.isfinite(cc):
            continue
        for j in range(n):
            if processed[j]:
                continue
            d2 = 0.0
            for c in range(d):
                diff = X[best, c] - X[j, c]
                d2 += diff * diff
            w = np.sqrt(d2)
            if cc > w:
                w = cc
            if w < reach[j]:
                reach[j] = w
                pred[j] = best
    return order, out_reach, pred


@njit(cache=True)
def flat_mean_shift_pass(X, data_bandwidths, Y, out):
    """One flat-kernel mean-shift update with the sample-point estimator:
    data point j belongs to the window at y when d(y, x_j) <= h_j, so the
    window at a position is the same for every trajectory passing through
    it. An empty window leaves the position unchanged.
    """
    n, d = X.shape
    m = Y.shape[0]
    for t in range(m):
        cnt = 0
        for c in range(d):
            out[t, c] = 0.0
        for j in range(n):
            d2 = 0.0
            for c in range(d):
                diff = X[j, c] - Y[t, c]
                d2 += diff * diff
            hj = data_bandwidths[j]
            if d2 <= hj * hj:
                cnt += 1
                for c in range(d):
                    out[t, c] += X[j, c]
        if cnt > 0:
            for c in range(d):
                out[t, c] /= cnt
        else:
            for c in range(d):
                out[t, c] = Y[t, c]


@njit(cache=True)
def _heap_push_replace(heap, size, v):
    """Max-heap of the k smallest values seen; returns the new size."""
    k = heap.shape[0]
    if size < k:
        # push
        heap[size] = v
        i = size
        while i > 0:
            p = (i - 1) // 2
            if heap[p] < heap[i]:
                heap[p], heap[i] = heap[i], heap[p]
                i = p
            else:
                break
        return size + 1
    if v >= heap[0]:
        return size
    heap[0] = v
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        big = i
        if l < k and heap[l] > heap[big]:
            big = l
        if r < k and heap[r] > heap[big]:
            big = r
        if big == i:
            break
        heap[i], heap[big] = heap[big], heap[i]
        i = big
    return size


@njit(cache=True)
def knn_stats(X, k, include_self):
    """Per point: (k-th smallest distance, mean of the k smallest), using
    the plain sum-of-squares formula so results match a scalar oracle bit
    for bit. Self-inclusive counting treats d(x, x) = 0 as a neighbor."""
    n, d = X.shape
    kth = np.empty(n, dtype=np.float64)
    mean_k = np.empty(n, dtype=np.float64)
    heap = np.empty(k, dtype=np.float64)
    for i in range(n):
        size = 0
        for j in range(n):
            if not include_self and j == i:
                continue
            d2 = 0.0
            for c in range(d):
                diff = X[i, c] - X[j, c]
                d2 += diff * diff
            size = _heap_push_replace(heap, size, d2)
        buf = np.sqrt(np.sort(heap[:size]))
        kth[i] = buf[size - 1]
        s = 0.0
        for t in range(size):
            s += buf[t]
        mean_k[i] = s / size
    return kth, mean_k
