"""Pre-clustering hyperparameter estimation.

Subsets of 10/20/30% of the data feed three diagnostics: the sorted
k-distance curve with its maximum-curvature knee (the epsilon estimate),
a silhouette sweep over a DBSCAN epsilon grid, and a silhouette sweep over
a k-means cluster-count grid. The sweeps run on every subset; the chosen
(epsilon, k) default to the argmax on the largest subset. Note the
deliberate leakage caveat: tuning sees the full standardized dataset, train
and test alike, and the docs reproduce that caveat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RunSeed, SensorFrame
from .cluster import dbscan, kmeans
from .cluster.common import as_matrix, knn_mean_distance, pairwise_distances
from .errors import (
    InsufficientDataError,
    NoKneeError,
    ParameterError,
    TuningFailureError,
    UndefinedScoreError,
)

DEFAULT_SUBSET_FRACTIONS = (0.10, 0.20, 0.30)
DEFAULT_KDIST_K = 4
DEFAULT_EPS_GRID = tuple(np.round(np.arange(0.1, 2.01, 0.1), 10))
DEFAULT_K_GRID = tuple(range(2, 13))
DEFAULT_MIN_PTS = 4
_PRECOMPUTE_LIMIT = 8000   # full distance matrix above this would not pay off


def sample_subsets(frame: SensorFrame, fractions, seed: RunSeed) -> list[SensorFrame]:
    """Uniform row samples without replacement, one per fraction, each kept
    in original time order. Deterministic per seed."""
    n = frame.n_rows
    out = []
    for pos, f in enumerate(fractions):
        if not 0.0 < f <= 1.0:
            raise ParameterError(f"fraction {f} outside (0, 1]")
        m = int(round(f * n))
        if m < 10:
            raise InsufficientDataError(f"fraction {f} of {n} rows leaves {m} < 10 rows")
        if m == n:
            out.append(frame)
            continue
        rng = seed.rng("tune.sample_subsets", pos)
        idx = np.sort(rng.choice(n, size=m, replace=False))
        out.append(frame.select_rows(idx))
    return out


def kdistance_curve(frame, k: int = DEFAULT_KDIST_K) -> np.ndarray:
    """Mean distance from each point to its k nearest neighbors (self
    excluded), sorted ascending."""
    X = as_matrix(frame)
    if k >= X.shape[0]:
        raise ParameterError(f"k={k} must be < n={X.shape[0]}")
    if k < 1:
        raise ParameterError("k must be >= 1")
    return np.sort(knn_mean_distance(X, k))


def detect_knee(curve) -> tuple[int, float]:
    """Maximum-curvature point of a sorted curve: normalize both axes to
    [0, 1] and take the index farthest below the first-to-last chord."""
    y = np.asarray(curve, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] < 3:
        raise ParameterError("curve must be 1-d with at least 3 points")
    if np.any(np.diff(y) < 0):
        raise ParameterError("curve must be non-decreasing")
    rng_y = float(y[-1] - y[0])
    if rng_y <= 0.0:
        raise NoKneeError("flat curve has no knee")
    x = np.linspace(0.0, 1.0, y.shape[0])
    yn = (y - y[0]) / rng_y
    below = (x - yn) / np.sqrt(2.0)   # signed distance below the y=x chord
    idx = int(np.argmax(below))
    if below[idx] < 1e-9:
        raise NoKneeError("curve does not bend below its chord")
    return idx, float(y[idx])


def silhouette_score(frame, labels, distances: np.ndarray | None = None) -> float:
    """Mean silhouette over non-noise points. a = mean distance to the
    point's own cluster (0 score for singletons), b = smallest mean distance
    to another cluster."""
    X = as_matrix(frame)
    lab = np.asarray(labels, dtype=np.int64)
    if lab.shape[0] != X.shape[0]:
        raise ParameterError("labels length must match row count")
    keep = lab >= 0
    lab = lab[keep]
    uniq, inv = np.unique(lab, return_inverse=True)
    if uniq.size < 2:
        raise UndefinedScoreError("silhouette needs at least 2 non-noise clusters")
    if distances is not None:
        D = distances[np.ix_(keep, keep)]
    else:
        Xk = X[keep]
        D = pairwise_distances(Xk, Xk)
    counts = np.bincount(inv)
    onehot = np.zeros((inv.shape[0], uniq.size))
    onehot[np.arange(inv.shape[0]), inv] = 1.0
    sums = D @ onehot                      # (m, c) total distance to each cluster
    own = sums[np.arange(inv.shape[0]), inv]
    scores = np.zeros(inv.shape[0])
    multi = counts[inv] > 1
    a = np.zeros_like(own)
    a[multi] = own[multi] / (counts[inv][multi] - 1)
    other = sums / counts[None, :]
    other[np.arange(inv.shape[0]), inv] = np.inf
    b = other.min(axis=1)
    denom = np.maximum(a, b)
    ok = multi & (denom > 0)
    scores[ok] = (b[ok] - a[ok]) / denom[ok]
    return float(scores.mean())


def sweep_epsilon(
    frame,
    eps_grid=DEFAULT_EPS_GRID,
    min_pts: int = DEFAULT_MIN_PTS,
    distances: np.ndarray | None = None,
) -> list[tuple[float, float]]:
    """DBSCAN silhouette per epsilon; grid points with undefined scores are
    simply absent from the result."""
    X = as_matrix(frame)
    if len(eps_grid) == 0:
        raise ParameterError("empty epsilon grid")
    if distances is None and X.shape[0] <= _PRECOMPUTE_LIMIT:
        distances = pairwise_distances(X, X)
    out = []
    for eps in eps_grid:
        assign = dbscan(X, float(eps), min_pts, distances=distances)
        try:
            score = silhouette_score(X, assign.labels, distances=distances)
        except UndefinedScoreError:
            continue
        out.append((float(eps), score))
    return out


def sweep_k(
    frame,
    k_grid=DEFAULT_K_GRID,
    seed: RunSeed = RunSeed(0),
    distances: np.ndarray | None = None,
) -> list[tuple[int, float]]:
    """K-means silhouette per cluster count."""
    X = as_matrix(frame)
    if len(k_grid) == 0:
        raise ParameterError("empty k grid")
    if distances is None and X.shape[0] <= _PRECOMPUTE_LIMIT:
        distances = pairwise_distances(X, X)
    out = []
    for k in k_grid:
        _, assign = kmeans(X, int(k), seed)
        try:
            score = silhouette_score(X, assign.labels, distances=distances)
        except UndefinedScoreError:
            continue
        out.append((int(k), score))
    return out


def argmax_sweep(pairs):
    """Largest score wins; ties go to the smaller parameter value."""
    if not pairs:
        raise TuningFailureError("every grid point produced an undefined score")
    best_v, best_s = pairs[0]
    for v, s in pairs[1:]:
        if s > best_s or (s == best_s and v < best_v):
            best_v, best_s = v, s
    return best_v


@dataclass(frozen=True)
class SubsetTuning:
    fraction: float
    n_rows: int
    kdist_curve: np.ndarray
    knee_index: int
    knee_epsilon: float
    silhouette_vs_epsilon: tuple[tuple[float, float], ...]
    silhouette_vs_k: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class TuneResult:
    subsets: tuple[SubsetTuning, ...]
    chosen_epsilon: float
    chosen_k: int
    aggregation: str = "largest"


def tune(
    frame: SensorFrame,
    seed: RunSeed,
    fractions=DEFAULT_SUBSET_FRACTIONS,
    kdist_k: int = DEFAULT_KDIST_K,
    eps_grid=DEFAULT_EPS_GRID,
    k_grid=DEFAULT_K_GRID,
    min_pts: int = DEFAULT_MIN_PTS,
) -> TuneResult:
    """Full tuning pass over every subset; chosen values come from the
    largest subset's sweeps."""
    subsets = sample_subsets(frame, fractions, seed)
    results = []
    for sub, fraction in zip(subsets, fractions):
        X = sub.values
        distances = None
        if X.shape[0] <= _PRECOMPUTE_LIMIT:
            distances = pairwise_distances(X, X)
        curve = kdistance_curve(sub, kdist_k)
        try:
            knee_idx, knee_eps = detect_knee(curve)
        except NoKneeError:
            knee_idx, knee_eps = -1, float("nan")
        sil_eps = sweep_epsilon(sub, eps_grid, min_pts, distances=distances)
        sil_k = sweep_k(sub, k_grid, seed, distances=distances)
        results.append(
            SubsetTuning(
                float(fraction),
                sub.n_rows,
                curve,
                knee_idx,
                knee_eps,
                tuple(sil_eps),
                tuple(sil_k),
            )
        )
    largest = max(results, key=lambda r: r.n_rows)
    chosen_eps = float(argmax_sweep(list(largest.silhouette_vs_epsilon)))
    chosen_k = int(argmax_sweep(list(largest.silhouette_vs_k)))
    return TuneResult(tuple(results), chosen_eps, chosen_k)
