"""Lloyd's k-means with seeded k-means++ initialization.

Supports per-point weights so the BIRCH global step can reuse the exact
same code path (and RNG stream) on its subcluster centroids.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..core import Algorithm, ClusterAssignment, RunSeed
from ..errors import ParameterError
from .common import as_matrix


@dataclass(frozen=True)
class KMeansModel:
    centroids: np.ndarray
    inertia: float
    iterations: int
    inertia_history: tuple[float, ...]


def _sq_dists_to_centers(X, centers):
    """Exact (n, k) squared distances; k is small so the direct broadcast
    formula costs little and keeps d(x, x) identically zero."""
    return ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def _weighted_pick(rng: np.random.Generator, weights: np.ndarray) -> int:
    total = float(weights.sum())
    if total <= 0.0:
        # degenerate: all candidate mass zero, fall back to the first index
        return 0
    r = rng.random() * total
    return int(np.searchsorted(np.cumsum(weights), r, side="right").clip(0, len(weights) - 1))


def _plus_plus_init(X, k, w, rng) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]), dtype=np.float64)
    first = _weighted_pick(rng, w)
    centers[0] = X[first]
    d2 = _sq_dists_to_centers(X, centers[:1])[:, 0]
    for j in range(1, k):
        mass = w * d2
        if mass.sum() <= 0.0:
            # fewer distinct points than k; fall back to weight-propnal picks
            mass = w
        idx = _weighted_pick(rng, mass)
        centers[j] = X[idx]
        np.minimum(d2, _sq_dists_to_centers(X, centers[j : j + 1])[:, 0], out=d2)
    return centers


def kmeans(
    X,
    k: int,
    seed: RunSeed,
    weights: np.ndarray | None = None,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> tuple[KMeansModel, ClusterAssignment]:
    """Seeded k-means++ then Lloyd iterations until the largest centroid
    shift drops below tol. Ties in assignment go to the lowest centroid
    index; a cluster that empties is reseeded to the farthest point."""
    X = as_matrix(X)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k={k} must lie in [1, n={n}]")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    rng = seed.rng("cluster.kmeans")
    t0 = time.perf_counter()
    centers = _plus_plus_init(X, k, w, rng)
    history: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    for it in range(1, max_iter + 1):
        D = _sq_dists_to_centers(X, centers)
        labels = np.argmin(D, axis=1)
        mind = D[np.arange(n), labels]
        history.append(float(np.sum(w * mind)))
        new_centers = centers.copy()
        counts = np.zeros(k)
        np.add.at(counts, labels, w)
        for j in range(k):
            if counts[j] > 0:
                new_centers[j] = np.average(X[labels == j], axis=0, weights=w[labels == j])
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            # hand each empty cluster the point currently farthest from its
            # own centroid, farthest first
            far_order = np.argsort(-mind, kind="stable")
            used = 0
            for j in empties:
                new_centers[j] = X[far_order[used]]
                used += 1
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if shift < tol:
            break
    D = _sq_dists_to_centers(X, centers)
    labels = np.argmin(D, axis=1)
    inertia = float(np.sum(w * D[np.arange(n), labels]))
    history.append(inertia)
    fit_seconds = time.perf_counter() - t0
    model = KMeansModel(centers, inertia, it, tuple(history))
    assignment = ClusterAssignment(
        Algorithm.KMEANS, _contiguous(labels), {"k": float(k)}, fit_seconds
    )
    return model, assignment


def _contiguous(labels: np.ndarray) -> np.ndarray:
    # k-means labels are already 0..k-1 unless some cluster stayed empty
    uniq = np.unique(labels)
    if uniq.size and uniq[-1] == uniq.size - 1:
        return labels
    remap = {int(v): i for i, v in enumerate(uniq)}
    return np.array([remap[int(v)] for v in labels], dtype=np.int64)
