"""Numba kernels for classifier inner loops: exact greedy tree splits and
the SMO dual solver. Sequential by design."""

from __future__ import annotations

import numpy as np
from numba import njit

_MIN_GAIN = 1e-12


@njit(cache=True)
def node_best_split_gini(X, rows, w, y, feat_ids):
    """Exhaustive weighted-Gini split search over the candidate features of
    one node. Candidate thresholds are midpoints between consecutive
    distinct sorted values. Ties keep the first (feature order, then lowest
    threshold); a split is returned only if it strictly reduces impurity.

    Returns (feature, threshold, gain, parent_gini); feature -1 means
    no acceptable split.
    """
    m = rows.size
    W = 0.0
    W1 = 0.0
    for t in range(m):
        r = rows[t]
        W += w[r]
        W1 += w[r] * y[r]
    W0 = W - W1
    parent = 1.0 - (W1 / W) ** 2 - (W0 / W) ** 2
    best_gain = _MIN_GAIN
    best_f = -1
    best_thr = 0.0
    if parent <= 0.0:
        return best_f, best_thr, 0.0, parent
    vals = np.empty(m, dtype=np.float64)
    for fi in range(feat_ids.size):
        f = feat_ids[fi]
        for t in range(m):
            vals[t] = X[rows[t], f]
        order = np.argsort(vals, kind="mergesort")
        wl = 0.0
        wl1 = 0.0
        for t in range(m - 1):
            r = rows[order[t]]
            wl += w[r]
            wl1 += w[r] * y[r]
            v0 = vals[order[t]]
            v1 = vals[order[t + 1]]
            if v1 <= v0:
                continue
            wr = W - wl
            wr1 = W1 - wl1
            if wl <= 0.0 or wr <= 0.0:
                continue
            gl = 1.0 - (wl1 / wl) ** 2 - ((wl - wl1) / wl) ** 2
            gr = 1.0 - (wr1 / wr) ** 2 - ((wr - wr1) / wr) ** 2
            gain = parent - (wl * gl + wr * gr) / W
            if gain > best_gain:
                best_gain = gain
                best_f = f
                best_thr = 0.5 * (v0 + v1)
    if best_f < 0:
        return best_f, best_thr, 0.0, parent
    return best_f, best_thr, best_gain, parent


@njit(cache=True)
def node_best_split_sse(X, rows, g, feat_ids):
    """Variance-reduction split search for regression targets g.

    Maximizes sum_L^2/n_L + sum_R^2/n_R (equivalent to minimizing the
    post-split squared error). Returns (feature, threshold, improvement).
    """
    m = rows.size
    S = 0.0
    for t in range(m):
        S += g[rows[t]]
    base = (S * S) / m
    best_score = base + _MIN_GAIN
    best_f = -1
    best_thr = 0.0
    vals = np.empty(m, dtype=np.float64)
    for fi in range(feat_ids.size):
        f = feat_ids[fi]
        for t in range(m):
            vals[t] = X[rows[t], f]
        order = np.argsort(vals, kind="mergesort")
        sl = 0.0
        for t in range(m - 1):
            sl += g[rows[order[t]]]
            v0 = vals[order[t]]
            v1 = vals[order[t + 1]]
            if v1 <= v0:
                continue
            nl = t + 1.0
            nr = m - nl
            score = (sl * sl) / nl + ((S - sl) * (S - sl)) / nr
            if score > best_score:
                best_score = score
                best_f = f
                best_thr = 0.5 * (v0 + v1)
    return best_f, best_thr, best_score - base


@njit(cache=True)
def grow_regression_tree_levelwise(X, order, g, max_depth, min_samples_split):
    """Depth-limited variance-reduction tree from per-feature presorted row
    orders, built level by level in single passes.

    Returns (feature, threshold, left, right, node_of): per-node split
    arrays (feature -1 marks a leaf) and each sample's final leaf id.
    Node ids are assigned in creation order, root = 0.
    """
    n, d = X.shape
    max_nodes = 2 ** (max_depth + 1) - 1
    feature = np.full(max_nodes, -1, dtype=np.int64)
    threshold = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    node_of = np.zeros(n, dtype=np.int64)
    n_nodes = 1
    level_start = 0
    for depth in range(max_depth):
        level_end = n_nodes
        if level_start == level_end:
            break
        width = level_end - level_start
        # per-node totals
        tot_sum = np.zeros(width)
        tot_cnt = np.zeros(width, dtype=np.int64)
        for i in range(n):
            nd = node_of[i] - level_start
            if nd >= 0:
                tot_sum[nd] += g[i]
                tot_cnt[nd] += 1
        best_gain = np.zeros(width)
        best_feat = np.full(width, -1, dtype=np.int64)
        best_thr = np.zeros(width)
        run_sum = np.zeros(width)
        run_cnt = np.zeros(width, dtype=np.int64)
        prev_val = np.zeros(width)
        for f in range(d):
            for t in range(width):
                run_sum[t] = 0.0
                run_cnt[t] = 0
            for s in range(n):
                i = order[f, s]
                nd = node_of[i] - level_start
                if nd < 0:
                    continue
                v = X[i, f]
                cnt = run_cnt[nd]
                if cnt > 0 and v > prev_val[nd] and cnt < tot_cnt[nd]:
                    m = tot_cnt[nd]
                    if m >= min_samples_split:
                        sl = run_sum[nd]
                        nl = float(cnt)
                        nr = float(m - cnt)
                        S = tot_sum[nd]
                        gain = (sl * sl) / nl + (S - sl) * (S - sl) / nr - (S * S) / m
                        if gain > best_gain[nd] + _MIN_GAIN:
                            best_gain[nd] = gain
                            best_feat[nd] = f
                            best_thr[nd] = 0.5 * (prev_val[nd] + v)
                run_sum[nd] += g[i]
                run_cnt[nd] = cnt + 1
                prev_val[nd] = v
        # materialize children and route samples
        made_split = False
        for t in range(width):
            if best_feat[t] >= 0:
                node = level_start + t
                feature[node] = best_feat[t]
                threshold[node] = best_thr[t]
                left[node] = n_nodes
                right[node] = n_nodes + 1
                n_nodes += 2
                made_split = True
        if not made_split:
            break
        for i in range(n):
            nd = node_of[i]
            if level_start <= nd < level_end and feature[nd] >= 0:
                if X[i, feature[nd]] <= threshold[nd]:
                    node_of[i] = left[nd]
                else:
                    node_of[i] = right[nd]
        level_start = level_end
    return feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes], node_of


@njit(cache=True)
def knn_vote_chunk(G, sq_q, sq_r, y, k, out_votes):
    """Class-1 vote counts of the k nearest references per query row.

    G is the query-chunk x references inner-product block; squared
    distances sq_q + sq_r - 2G are formed on the fly so the block is read
    exactly once. Distance ties at the k-th position keep the lower
    reference index (ascending scan order).
    """
    m, n = G.shape
    dist = np.empty(k, dtype=np.float64)
    idx = np.empty(k, dtype=np.int64)
    for i in range(m):
        size = 0
        worst = np.inf
        worst_at = 0
        base = sq_q[i]
        for j in range(n):
            d2 = base + sq_r[j] - 2.0 * G[i, j]
            if size < k:
                dist[size] = d2
                idx[size] = j
                size += 1
                if size == k:
                    worst = dist[0]
                    worst_at = 0
                    for t in range(1, k):
                        if dist[t] > worst:
                            worst = dist[t]
                            worst_at = t
            elif d2 < worst:
                dist[worst_at] = d2
                idx[worst_at] = j
                worst = dist[0]
                worst_at = 0
                for t in range(1, k):
                    if dist[t] > worst:
                        worst = dist[t]
                        worst_at = t
        ones = 0
        for t in range(size):
            ones += y[idx[t]]
        out_votes[i] = ones


@njit(cache=True)
def _rbf_row(X, sq, i, gamma, out):
    n, d = X.shape
    for j in range(n):
        dot = 0.0
        for c in range(d):
            dot += X[i, c] * X[j, c]
        out[j] = np.exp(-gamma * (sq[i] + sq[j] - 2.0 * dot))


@njit(cache=True)
def _cached_row(X, sq, gamma, i, cache, cache_slot, slot_owner, slot_used, tick):
    """Kernel row through a fixed-slot LRU cache; returns the slot index."""
    slot = cache_slot[i]
    if slot >= 0 and slot_owner[slot] == i:
        slot_used[slot] = tick
        return slot
    # evict least recently used
    best = 0
    oldest = slot_used[0]
    for s in range(1, slot_used.shape[0]):
        if slot_used[s] < oldest:
            oldest = slot_used[s]
            best = s
    old = slot_owner[best]
    if old >= 0:
        cache_slot[old] = -1
    _rbf_row(X, sq, i, gamma, cache[best])
    slot_owner[best] = i
    cache_slot[i] = best
    slot_used[best] = tick
    return best


@njit(cache=True)
def smo_rbf_train(X, y, C, gamma, tol, max_pairs, cache_rows):
    """Sequential minimal optimization for the RBF-kernel SVC dual.

    Working-set selection is the standard maximal-violating-pair rule with
    a second-order choice of the partner. Stops when the duality-gap
    measure m - M drops to tol. Returns (alpha, bias, pairs_done,
    final_violation).
    """
    n, d = X.shape
    sq = np.empty(n)
    for i in range(n):
        s = 0.0
        for c in range(d):
            s += X[i, c] * X[i, c]
        sq[i] = s
    alpha = np.zeros(n)
    F = np.zeros(n)              # sum_j alpha_j y_j K_ij
    cache = np.empty((cache_rows, n))
    cache_slot = np.full(n, -1, dtype=np.int64)
    slot_owner = np.full(cache_rows, -1, dtype=np.int64)
    slot_used = np.full(cache_rows, -1, dtype=np.int64)
    tick = 0
    pairs = 0
    viol = np.inf
    while pairs < max_pairs:
        # selection: m over I_up of (y - F), M over I_low
        i_sel = -1
        m_val = -np.inf
        M_val = np.inf
        for t in range(n):
            gval = y[t] - F[t]
            up = (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0)
            low = (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C)
            if up and gval > m_val:
                m_val = gval
                i_sel = t
            if low and gval < M_val:
                M_val = gval
        viol = m_val - M_val
        if viol <= tol or i_sel < 0:
            break
        tick += 1
        si = _cached_row(X, sq, gamma, i_sel, cache, cache_slot, slot_owner, slot_used, tick)
        row_i = cache[si]
        # second-order partner: minimize -b^2 / a among violating I_low
        j_sel = -1
        best_obj = 0.0
        for t in range(n):
            gval = y[t] - F[t]
            low = (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C)
            if not low or gval >= m_val:
                continue
            b_it = m_val - gval
            a_it = 2.0 - 2.0 * row_i[t]
            if a_it < 1e-12:
                a_it = 1e-12
            obj = -(b_it * b_it) / a_it
            if obj < best_obj:
                best_obj = obj
                j_sel = t
        if j_sel < 0:
            break
        tick += 1
        sj = _cached_row(X, sq, gamma, j_sel, cache, cache_slot, slot_owner, slot_used, tick)
        row_j = cache[sj]
        # analytic step along the feasible pair direction
        quad = 2.0 - 2.0 * row_i[j_sel]
        if quad < 1e-12:
            quad = 1e-12
        step = ((y[i_sel] - F[i_sel]) - (y[j_sel] - F[j_sel])) / quad
        # box constraints for alpha_i + yi*t and alpha_j - yj*t
        if y[i_sel] > 0:
            hi_i = C - alpha[i_sel]
            lo_i = -alpha[i_sel]
        else:
            hi_i = alpha[i_sel]
            lo_i = alpha[i_sel] - C
        if y[j_sel] > 0:
            hi_j = alpha[j_sel]
            lo_j = alpha[j_sel] - C
        else:
            hi_j = C - alpha[j_sel]
            lo_j = -alpha[j_sel]
        hi = min(hi_i, hi_j)
        lo = max(lo_i, lo_j)
        if step > hi:
            step = hi
        elif step < lo:
            step = lo
        if step == 0.0:
            break
        alpha[i_sel] += y[i_sel] * step
        alpha[j_sel] -= y[j_sel] * step
        for t in range(n):
            F[t] += step * (row_i[t] - row_j[t])
        pairs += 1
    bias = 0.0
    if np.isfinite(viol):
        # recompute the final m, M for the bias
        m_val = -np.inf
        M_val = np.inf
        for t in range(n):
            gval = y[t] - F[t]
            up = (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0)
            low = (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C)
            if up and gval > m_val:
                m_val = gval
            if low and gval < M_val:
                M_val = gval
        viol = m_val - M_val
        bias = 0.5 * (m_val + M_val)
    return alpha, bias, pairs, viol
