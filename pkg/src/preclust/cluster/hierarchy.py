"""HDBSCAN: density-scaled single linkage with stability-based extraction.

Pipeline: core distances (min_samples-th nearest, self-inclusive count)
-> mutual reachability max(core_a, core_b, d(a, b)) -> MST by Prim
-> single-linkage dendrogram -> condensed tree at min_cluster_size
-> flat clusters from excess-of-mass stability maxima. Points that never
belong to a selected cluster come back as noise (-1); the root is never
selected, so data with no density structure at the requested size comes
back all noise.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..core import Algorithm, ClusterAssignment, relabel_contiguous
from ..errors import ParameterError
from ._kernels import prim_mutual_reachability_mst
from .common import as_matrix, kth_nearest_distance


@dataclass(frozen=True)
class CondensedEdge:
    parent: int
    child: int          # < n_points: a point falling out; >= n_points: a subcluster
    lam: float          # 1 / merge distance
    child_size: int


@dataclass(frozen=True)
class CondensedTree:
    n_points: int
    edges: tuple[CondensedEdge, ...]
    stability: dict[int, float]

    @property
    def root(self) -> int:
        return self.n_points

    def cluster_ids(self) -> list[int]:
        return sorted(self.stability)

    def children_of(self, cluster: int) -> list[int]:
        return [e.child for e in self.edges if e.parent == cluster and e.child >= self.n_points]


def _single_linkage(edge_a, edge_b, edge_w):
    """Union-find agglomeration of sorted MST edges into a dendrogram.

    Returns (left, right, dist, size) rows; new node i has id n + i.
    """
    n = edge_a.shape[0] + 1
    order = np.argsort(edge_w, kind="stable")
    parent = np.arange(2 * n - 1, dtype=np.int64)
    size = np.ones(2 * n - 1, dtype=np.int64)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    rows = np.empty((n - 1, 4), dtype=np.float64)
    nxt = n
    for t, e in enumerate(order):
        ra, rb = find(edge_a[e]), find(edge_b[e])
        rows[t] = (ra, rb, edge_w[e], size[ra] + size[rb])
        parent[ra] = nxt
        parent[rb] = nxt
        size[nxt] = size[ra] + size[rb]
        nxt += 1
    return rows


def _condense(linkage: np.ndarray, n: int, min_cluster_size: int):
    """Collapse the dendrogram: splits where both children reach
    min_cluster_size create new condensed clusters, everything else falls
    out of its parent as points."""
    root = 2 * n - 2
    relabel = np.full(2 * n - 1, -1, dtype=np.int64)
    relabel[root] = n
    next_label = n + 1
    edges: list[CondensedEdge] = []
    ignore = np.zeros(2 * n - 1, dtype=bool)

    def leaves(node: int):
        stack = [node]
        out = []
        while stack:
            v = stack.pop()
            if v < n:
                out.append(v)
            else:
                row = linkage[v - n]
                stack.append(int(row[0]))
                stack.append(int(row[1]))
        return out

    for node in range(root, n - 1, -1):
        if ignore[node] or relabel[node] == -1:
            # a node we never reached as a live cluster: its points were
            # already emitted by an ancestor
            continue
        row = linkage[node - n]
        left, right = int(row[0]), int(row[1])
        dist = float(row[2])
        lam = 1.0 / dist if dist > 0.0 else np.inf
        cl = int(relabel[node])
        lsz = 1 if left < n else int(linkage[left - n][3])
        rsz = 1 if right < n else int(linkage[right - n][3])
        if lsz >= min_cluster_size and rsz >= min_cluster_size:
            relabel[left] = next_label
            edges.append(CondensedEdge(cl, next_label, lam, lsz))
            next_label += 1
            relabel[right] = next_label
            edges.append(CondensedEdge(cl, next_label, lam, rsz))
            next_label += 1
        elif lsz < min_cluster_size and rsz < min_cluster_size:
            for p in leaves(left):
                edges.append(CondensedEdge(cl, p, lam, 1))
            for p in leaves(right):
                edges.append(CondensedEdge(cl, p, lam, 1))
            if left >= n:
                ignore[left] = True
            if right >= n:
                ignore[right] = True
        elif lsz < min_cluster_size:
            relabel[right] = cl
            for p in leaves(left):
                edges.append(CondensedEdge(cl, p, lam, 1))
            if left >= n:
                ignore[left] = True
        else:
            relabel[left] = cl
            for p in leaves(right):
                edges.append(CondensedEdge(cl, p, lam, 1))
            if right >= n:
                ignore[right] = True
    return edges


def _stability(edges: list[CondensedEdge], n: int) -> dict[int, float]:
    birth: dict[int, float] = {n: 0.0}
    for e in edges:
        if e.child >= n:
            birth[e.child] = e.lam
    stab: dict[int, float] = {c: 0.0 for c in birth}
    for e in edges:
        lam = e.lam
        if not np.isfinite(lam):
            lam = birth[e.parent]  # duplicate points contribute no excess mass
        stab[e.parent] += (lam - birth[e.parent]) * e.child_size
    return stab


def _select_excess_of_mass(tree_children: dict[int, list[int]], stab: dict[int, float], root: int):
    """Bottom-up: a cluster is kept when its own stability beats the sum of
    its children's; the root is never selected."""
    selected: set[int] = set()
    subtree: dict[int, float] = {}

    for node in sorted(stab, reverse=True):
        kids = tree_children.get(node, [])
        if not kids:
            subtree[node] = stab[node]
            selected.add(node)
            continue
        child_sum = sum(subtree[k] for k in kids)
        if node != root and stab[node] >= child_sum:
            subtree[node] = stab[node]
            selected.add(node)
            for k in kids:
                _deselect_subtree(k, tree_children, selected)
        else:
            subtree[node] = child_sum
    selected.discard(root)
    return selected


def _deselect_subtree(node, tree_children, selected):
    stack = [node]
    while stack:
        v = stack.pop()
        selected.discard(v)
        stack.extend(tree_children.get(v, []))


def hdbscan(
    X,
    min_cluster_size: int = 5,
    min_samples: int | None = None,
) -> tuple[CondensedTree, ClusterAssignment]:
    if min_cluster_size < 2:
        raise ParameterError("min_cluster_size must be >= 2")
    X = as_matrix(X)
    n = X.shape[0]
    if min_samples is None:
        min_samples = min_cluster_size
    t0 = time.perf_counter()
    if n >= min_samples:
        core = kth_nearest_distance(X, min_samples, include_self=True)
    else:
        core = np.zeros(n)
    if n == 1:
        tree = CondensedTree(1, (), {1: 0.0})
        return tree, ClusterAssignment(
            Algorithm.HDBSCAN, np.full(1, -1, dtype=np.int64), {}, 0.0
        )
    ea, eb, ew = prim_mutual_reachability_mst(X, core)
    linkage = _single_linkage(ea, eb, ew)
    edges = _condense(linkage, n, min_cluster_size)
    stab = _stability(edges, n)
    children: dict[int, list[int]] = {}
    parent_of: dict[int, int] = {}
    for e in edges:
        if e.child >= n:
            children.setdefault(e.parent, []).append(e.child)
            parent_of[e.child] = e.parent
    selected = _select_excess_of_mass(children, stab, root=n)

    # nearest selected ancestor (including self) per condensed cluster;
    # condensed ids grow root -> leaves, so one ascending pass resolves it
    owner: dict[int, int] = {}
    for c in sorted(stab):
        if c in selected:
            owner[c] = c
        elif c == n:
            owner[c] = -1
        else:
            owner[c] = owner[parent_of[c]]

    labels = np.full(n, -1, dtype=np.int64)
    for e in edges:
        if e.child < n:
            own = owner.get(e.parent, -1)
            if own >= 0:
                labels[e.child] = own
    fit_seconds = time.perf_counter() - t0
    tree = CondensedTree(n, tuple(edges), stab)
    assignment = ClusterAssignment(
        Algorithm.HDBSCAN,
        relabel_contiguous(labels),
        {"min_cluster_size": float(min_cluster_size), "min_samples": float(min_samples)},
        fit_seconds,
    )
    return tree, assignment
