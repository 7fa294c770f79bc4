"""Shared helpers for the clustering algorithms."""

from __future__ import annotations

import numpy as np

from ..core import SensorFrame
from ._kernels import knn_stats


def as_matrix(X) -> np.ndarray:
    if isinstance(X, SensorFrame):
        return X.values
    return np.ascontiguousarray(X, dtype=np.float64)


def pairwise_distances(A: np.ndarray, B: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Dense Euclidean distances by the plain difference formula (summed in
    coordinate order, so values agree bitwise with a scalar loop). Prefer
    core.pairwise_sq_distances when last-bit agreement does not matter."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    out = np.empty((A.shape[0], B.shape[0]), dtype=np.float64)
    d = A.shape[1]
    for s in range(0, A.shape[0], chunk):
        blk = A[s : s + chunk]
        acc = np.zeros((blk.shape[0], B.shape[0]), dtype=np.float64)
        for c in range(d):
            diff = blk[:, c : c + 1] - B[None, :, c]
            acc += diff * diff
        out[s : s + chunk] = np.sqrt(acc)
    return out


def kth_nearest_distance(X: np.ndarray, k: int, include_self: bool) -> np.ndarray:
    """Distance from each point to its k-th nearest point.

    With include_self=True the point itself counts as its own first
    neighbor (the convention under which "core distance <= eps" matches the
    DBSCAN core test with self-inclusive neighborhoods).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    limit = n if include_self else n - 1
    if k < 1 or k > limit:
        raise ValueError(f"k={k} out of range for n={n}")
    kth, _ = knn_stats(X, k, include_self)
    return kth


def knn_mean_distance(X: np.ndarray, k: int) -> np.ndarray:
    """Mean distance from each point to its k nearest neighbors, self
    excluded."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    if k < 1 or k >= n:
        raise ValueError(f"k={k} out of range for n={n}")
    _, mean_k = knn_stats(X, k, False)
    return mean_k
