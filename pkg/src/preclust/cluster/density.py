"""DBSCAN and OPTICS.

Shared conventions: an eps-neighborhood includes the point itself, so
"core" means at least min_pts points within eps counting the point. The
OPTICS core distance is the min_pts-th smallest distance under the same
self-inclusive count, which makes an eps-cut of the reachability plot
reproduce the DBSCAN partition up to border-point assignment.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..core import Algorithm, ClusterAssignment, pairwise_sq_distances, relabel_contiguous
from ..errors import ParameterError
from ._kernels import optics_ordering
from .common import as_matrix, kth_nearest_distance


def dbscan(X, epsilon: float, min_pts: int, distances: np.ndarray | None = None) -> ClusterAssignment:
    """Classic DBSCAN. Deterministic: seeds are scanned in row order and
    expansion queues are FIFO, so a border point in reach of two clusters
    joins the one that reaches it first."""
    X = as_matrix(X)
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    if min_pts < 1:
        raise ParameterError("min_pts must be >= 1")
    n = X.shape[0]
    eps2 = float(epsilon) * float(epsilon)
    t0 = time.perf_counter()

    if distances is not None:
        D2 = None

        def region(i: int) -> np.ndarray:
            return np.flatnonzero(distances[i] <= epsilon)

    else:

        def region(i: int) -> np.ndarray:
            d2 = pairwise_sq_distances(X[i : i + 1], X)[0]
            return np.flatnonzero(d2 <= eps2)

    labels = np.full(n, -1, dtype=np.int64)
    queried = np.zeros(n, dtype=bool)
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or queried[i]:
            continue
        queried[i] = True
        neigh = region(i)
        if neigh.size < min_pts:
            continue
        labels[i] = cluster
        queue = deque((i,))
        while queue:
            p = queue.popleft()
            if p != i:
                if queried[p]:
                    continue
                queried[p] = True
                neigh = region(p)
                if neigh.size < min_pts:
                    continue
            newly = neigh[labels[neigh] == -1]
            labels[newly] = cluster
            queue.extend(newly.tolist())
        cluster += 1
    fit_seconds = time.perf_counter() - t0
    return ClusterAssignment(
        Algorithm.DBSCAN,
        labels,
        {"epsilon": float(epsilon), "min_pts": float(min_pts)},
        fit_seconds,
    )


@dataclass(frozen=True)
class OpticsResult:
    ordering: np.ndarray        # point indices in processing order
    reachability: np.ndarray    # aligned with ordering; +inf marks sweep starts
    core_distances: np.ndarray  # indexed by point
    predecessors: np.ndarray    # indexed by point; -1 for sweep starts
    assignment: ClusterAssignment


def optics(X, min_pts: int = 5, xi: float = 0.05) -> OpticsResult:
    """OPTICS with an unbounded radius and xi-steepness extraction."""
    X = as_matrix(X)
    n = X.shape[0]
    if min_pts < 2:
        raise ParameterError("min_pts must be >= 2")
    if not 0.0 < xi < 1.0:
        raise ParameterError("xi must lie in (0, 1)")
    t0 = time.perf_counter()
    if n >= min_pts:
        core = kth_nearest_distance(X, min_pts, include_self=True)
    else:
        core = np.full(n, np.inf)
    order, reach, pred = optics_ordering(X, core)
    clusters = _xi_clusters(
        reach, xi, max(min_pts, 2), predecessors=pred, ordering=order
    )
    labels_in_order = _labels_from_intervals(len(order), clusters)
    labels = np.empty(n, dtype=np.int64)
    labels[order] = labels_in_order
    fit_seconds = time.perf_counter() - t0
    assignment = ClusterAssignment(
        Algorithm.OPTICS,
        relabel_contiguous(labels),
        {"min_pts": float(min_pts), "xi": float(xi)},
        fit_seconds,
    )
    return OpticsResult(order, reach, core, pred, assignment)


def extract_eps_cut(result: OpticsResult, epsilon: float) -> ClusterAssignment:
    """DBSCAN-style flat clustering from the reachability plot: walking the
    ordering, a reachability jump above eps starts a new cluster at a core
    point (or marks noise), and points at or below eps continue the current
    cluster."""
    order = result.ordering
    reach = result.reachability
    core = result.core_distances
    labels = np.full(order.shape[0], -1, dtype=np.int64)
    cluster = -1
    for pos, p in enumerate(order):
        if reach[pos] > epsilon:
            if core[p] <= epsilon:
                cluster += 1
                labels[p] = cluster
            else:
                labels[p] = -1
        else:
            labels[p] = cluster
    return ClusterAssignment(
        Algorithm.OPTICS,
        relabel_contiguous(labels),
        {"epsilon": float(epsilon), "min_pts": float(np.nan)},
        0.0,
    )


def _extend_region(steep, opposite, start, min_pts):
    """Longest steep region starting at `start`: at most min_pts consecutive
    non-steep points are tolerated and a step in the opposite direction ends
    it."""
    n = steep.shape[0]
    index = start
    end = start
    non_steep = 0
    while index < n:
        if steep[index]:
            non_steep = 0
            end = index
        elif not opposite[index]:
            non_steep += 1
            if non_steep > min_pts:
                break
        else:
            break
        index += 1
    return end


def _correct_predecessor(r, predecessors, ordering, s, e):
    """Shrink the right edge of a candidate [s, e] until the last point was
    actually reached from inside the cluster; drops spurious candidates."""
    while s < e:
        if r[s] > r[e]:
            return s, e
        p_e = predecessors[ordering[e]]
        if p_e >= 0:
            for i in range(s, e):
                if p_e == ordering[i]:
                    return s, e
        e -= 1
    return -1, -1


def _xi_clusters(
    reach_in_order: np.ndarray,
    xi: float,
    min_cluster_size: int,
    predecessors: np.ndarray | None = None,
    ordering: np.ndarray | None = None,
):
    """Steep-area cluster extraction from a reachability plot.

    Follows the published ExtractClusters procedure: maintain the set of
    steep-down areas with their max-in-between values and combine each with
    every admissible steep-up area. Returns [start, end] index pairs into
    the ordering, inner clusters first.
    """
    # positions 0..n-1 are the real plot; an inf sentinel at n terminates a
    # trailing cluster with a final steep-up transition
    r = np.hstack((reach_in_order, [np.inf]))
    comp = 1.0 - xi
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = r[:-1] / r[1:]
        steep_up = ratio <= comp
        steep_down = ratio >= 1.0 / comp
        upward = ratio < 1.0
        downward = ratio > 1.0
    clusters: list[tuple[int, int]] = []
    sdas: list[dict] = []
    index = 0
    mib = 0.0
    for steep_index in np.flatnonzero(steep_up | steep_down):
        steep_index = int(steep_index)
        if steep_index < index:
            continue
        mib = max(mib, float(np.max(r[index : steep_index + 1])))
        if steep_down[steep_index]:
            sdas = _filter_sdas(mib, sdas, comp, r)
            d_start = steep_index
            d_end = _extend_region(steep_down, upward, d_start, min_cluster_size)
            sdas.append({"start": d_start, "end": d_end, "mib": 0.0})
            index = d_end + 1
            mib = float(r[index])
        else:
            sdas = _filter_sdas(mib, sdas, comp, r)
            u_start = steep_index
            u_end = _extend_region(steep_up, downward, u_start, min_cluster_size)
            index = u_end + 1
            mib = float(r[index])
            end_next = r[u_end + 1]
            u_clusters = []
            for dom in sdas:
                c_start, c_end = dom["start"], u_end
                if dom["mib"] > end_next * comp:
                    continue
                d_max = r[dom["start"]]
                if d_max * comp >= end_next:
                    # trim the left flank down to the cluster's exit level
                    while c_start < dom["end"] and r[c_start + 1] > end_next:
                        c_start += 1
                elif end_next * comp >= d_max:
                    # trim the right flank down to the entry level
                    while c_end > u_start and r[c_end] < d_max:
                        c_end -= 1
                if predecessors is not None:
                    c_start, c_end = _correct_predecessor(
                        r, predecessors, ordering, c_start, c_end
                    )
                    if c_start < 0:
                        continue
                if c_end - c_start + 1 < min_cluster_size:
                    continue
                if c_start > dom["end"]:
                    continue
                if c_end < u_start:
                    continue
                u_clusters.append((c_start, c_end))
            u_clusters.reverse()
            clusters.extend(u_clusters)
    # inner clusters must claim their points before enclosing ones
    clusters.sort(key=lambda c: (c[1], -c[0]))
    return clusters


def _filter_sdas(mib, sdas, comp, r):
    if np.isinf(mib):
        return []
    keep = [s for s in sdas if mib <= r[s["start"]] * comp]
    for s in keep:
        s["mib"] = max(s["mib"], mib)
    return keep


def _labels_from_intervals(n: int, clusters) -> np.ndarray:
    labels = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for s, e in clusters:
        span = labels[s : e + 1]
        if np.all(span == -1):
            labels[s : e + 1] = nxt
            nxt += 1
    return labels
