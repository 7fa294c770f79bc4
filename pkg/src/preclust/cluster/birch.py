"""BIRCH: CF-tree insertion followed by a weighted k-means global step.

Each subcluster keeps the classic (N, LS, SS) clustering feature, which is
additive under merging. A point is absorbed into the closest leaf
subcluster when the merged radius stays within the threshold; otherwise it
starts a new subcluster, and nodes that overflow the branching factor split
on their farthest entry pair. The global step runs weighted k-means on the
leaf subcluster centroids (in creation order), so at threshold 0 and unit
multiplicities it reduces exactly to plain k-means with the same seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..core import Algorithm, ClusterAssignment, RunSeed
from ..errors import ParameterError
from .common import as_matrix
from .kmeans import _contiguous, kmeans


@dataclass
class ClusteringFeature:
    """Additive (N, LS, SS) summary of a point set."""

    n: float
    ls: np.ndarray
    ss: float

    @classmethod
    def of_point(cls, x: np.ndarray) -> "ClusteringFeature":
        return cls(1.0, x.copy(), float(x @ x))

    def merged(self, other: "ClusteringFeature") -> "ClusteringFeature":
        return ClusteringFeature(self.n + other.n, self.ls + other.ls, self.ss + other.ss)

    def add(self, other: "ClusteringFeature") -> None:
        self.n += other.n
        self.ls = self.ls + other.ls
        self.ss += other.ss

    @property
    def centroid(self) -> np.ndarray:
        return self.ls / self.n

    @property
    def radius(self) -> float:
        c = self.ls / self.n
        return float(np.sqrt(max(self.ss / self.n - float(c @ c), 0.0)))


class _Node:
    __slots__ = ("is_leaf", "cfs", "children", "ids", "centroids")

    def __init__(self, is_leaf: bool):
        self.is_leaf = is_leaf
        self.cfs: list[ClusteringFeature] = []
        self.children: list["_Node"] = []   # internal nodes only
        self.ids: list[int] = []            # leaf subcluster creation ids
        self.centroids = np.empty((0, 0))

    def refresh_centroids(self):
        self.centroids = np.vstack([cf.centroid for cf in self.cfs])

    def nearest(self, x: np.ndarray) -> int:
        d = ((self.centroids - x) ** 2).sum(axis=1)
        return int(np.argmin(d))


class _CFTree:
    def __init__(self, branching_factor: int, threshold: float, d: int):
        self.bf = branching_factor
        self.threshold = threshold
        self.root = _Node(is_leaf=True)
        self.next_id = 0
        self.d = d

    def insert(self, x: np.ndarray) -> int:
        """Insert one point; returns the creation id of the leaf subcluster
        that absorbed it."""
        split, sub_id = self._insert(self.root, x)
        if split is not None:
            new_root = _Node(is_leaf=False)
            for node in split:
                new_root.cfs.append(self._node_cf(node))
                new_root.children.append(node)
            new_root.refresh_centroids()
            self.root = new_root
        return sub_id

    @staticmethod
    def _node_cf(node: _Node) -> ClusteringFeature:
        total = ClusteringFeature(0.0, np.zeros(node.cfs[0].ls.shape), 0.0)
        for cf in node.cfs:
            total.add(cf)
        return total

    def _insert(self, node: _Node, x: np.ndarray):
        cf_x = ClusteringFeature.of_point(x)
        if node.is_leaf:
            if node.cfs:
                j = node.nearest(x)
                merged = node.cfs[j].merged(cf_x)
                if merged.radius <= self.threshold:
                    node.cfs[j] = merged
                    node.centroids[j] = merged.centroid
                    return None, node.ids[j]
            node.cfs.append(cf_x)
            node.ids.append(self.next_id)
            self.next_id += 1
            node.refresh_centroids()
            if len(node.cfs) > self.bf:
                return self._split(node), node.ids[-1]
            return None, node.ids[-1]
        j = node.nearest(x)
        split, sub_id = self._insert(node.children[j], x)
        if split is None:
            node.cfs[j].add(cf_x)
            node.centroids[j] = node.cfs[j].centroid
            return None, sub_id
        left, right = split
        node.cfs[j] = self._node_cf(left)
        node.children[j] = left
        node.cfs.append(self._node_cf(right))
        node.children.append(right)
        node.refresh_centroids()
        if len(node.cfs) > self.bf:
            return self._split(node), sub_id
        return None, sub_id

    def _split(self, node: _Node):
        """Split on the farthest pair of entry centroids; every entry joins
        the closer seed (ties to the first)."""
        C = node.centroids
        m = C.shape[0]
        d2 = ((C[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
        i, j = divmod(int(np.argmax(d2)), m)
        to_first = d2[:, i] <= d2[:, j]
        first = _Node(node.is_leaf)
        second = _Node(node.is_leaf)
        for t in range(m):
            dst = first if to_first[t] else second
            dst.cfs.append(node.cfs[t])
            if node.is_leaf:
                dst.ids.append(node.ids[t])
            else:
                dst.children.append(node.children[t])
        first.refresh_centroids()
        second.refresh_centroids()
        return first, second

    def leaf_subclusters(self):
        """All leaf subclusters sorted by creation id."""
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.extend(zip(node.ids, node.cfs))
            else:
                stack.extend(node.children)
        out.sort(key=lambda t: t[0])
        return out


def birch(
    X,
    k_global: int,
    seed: RunSeed,
    branching_factor: int = 50,
    threshold: float = 0.5,
) -> ClusterAssignment:
    X = as_matrix(X)
    if branching_factor < 2:
        raise ParameterError("branching_factor must be >= 2")
    if threshold < 0:
        raise ParameterError("threshold must be >= 0")
    n, d = X.shape
    t0 = time.perf_counter()
    tree = _CFTree(branching_factor, threshold, d)
    point_sub = np.empty(n, dtype=np.int64)
    for i in range(n):
        point_sub[i] = tree.insert(X[i])
    subs = tree.leaf_subclusters()
    centroids = np.vstack([cf.centroid for _, cf in subs])
    weights = np.array([cf.n for _, cf in subs])
    k = min(k_global, len(subs))
    _, global_assign = kmeans(centroids, k, seed, weights=weights)
    id_to_pos = {sid: pos for pos, (sid, _) in enumerate(subs)}
    sub_labels = global_assign.labels
    labels = np.array([sub_labels[id_to_pos[int(s)]] for s in point_sub], dtype=np.int64)
    fit_seconds = time.perf_counter() - t0
    return ClusterAssignment(
        Algorithm.BIRCH,
        _contiguous(labels),
        {
            "branching_factor": float(branching_factor),
            "threshold": float(threshold),
            "k_global": float(k_global),
        },
        fit_seconds,
    )
