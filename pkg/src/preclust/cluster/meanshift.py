"""Adaptive mean shift: flat-kernel mode seeking with per-point bandwidths.

Sample-point estimator: each data point x_j carries bandwidth h_j (its
distance to the k_bandwidth-th nearest neighbor) and belongs to the window
at position y whenever d(y, x_j) <= h_j. Every point seeds a trajectory;
because the window at a position does not depend on which seed got there,
trajectories that meet merge exactly and are iterated once. Converged
modes within half the smallest bandwidth of each other merge, and points
are labeled by their merged mode.
"""

from __future__ import annotations

import time
import warnings

import numpy as np

from ..core import Algorithm, ClusterAssignment, RunSeed
from ..errors import ParameterError
from ._kernels import flat_mean_shift_pass
from .common import as_matrix, kth_nearest_distance

_BANDWIDTH_FLOOR = 1e-12


def flat_mean_shift_step(X, points, data_bandwidths) -> np.ndarray:
    """One flat-kernel update of `points` against the data X (exposed for
    fixed-point checks). `data_bandwidths` has one entry per data row."""
    X = as_matrix(X)
    Y = np.ascontiguousarray(points, dtype=np.float64)
    h = np.ascontiguousarray(data_bandwidths, dtype=np.float64)
    out = Y.copy()
    flat_mean_shift_pass(X, h, Y, out)
    return out


def _dedup(Y: np.ndarray, mapping: np.ndarray, frozen: np.ndarray):
    uniq, remap = np.unique(Y, axis=0, return_inverse=True)
    if uniq.shape[0] == Y.shape[0]:
        return Y, mapping, frozen
    new_frozen = np.zeros(uniq.shape[0], dtype=bool)
    np.logical_or.at(new_frozen, remap, frozen)
    return uniq, remap[mapping], new_frozen


def mean_shift_adaptive(
    X,
    k_bandwidth: int = 50,
    seed: RunSeed | None = None,
    max_iter: int = 300,
) -> ClusterAssignment:
    """Deterministic regardless of seed (the flat kernel has no stochastic
    step); the seed parameter keeps the clustering call surface uniform."""
    X = as_matrix(X)
    n = X.shape[0]
    if k_bandwidth >= n:
        raise ParameterError(f"k_bandwidth={k_bandwidth} must be < n={n}")
    if k_bandwidth < 1:
        raise ParameterError("k_bandwidth must be >= 1")
    t0 = time.perf_counter()
    h = kth_nearest_distance(X, k_bandwidth, include_self=False)
    if np.any(h < _BANDWIDTH_FLOOR):
        warnings.warn(
            "zero bandwidth from duplicate-heavy data; flooring at 1e-12",
            stacklevel=2,
        )
        h = np.maximum(h, _BANDWIDTH_FLOOR)
    tol = 1e-5 * float(np.median(h))

    # trajectory table: seeds sharing a position share all future updates
    modes, seed_to_mode, frozen = _dedup(X.copy(), np.arange(n), np.zeros(n, dtype=bool))
    for _ in range(max_iter):
        act = np.flatnonzero(~frozen)
        if act.size == 0:
            break
        out = np.empty((act.size, X.shape[1]))
        flat_mean_shift_pass(X, h, np.ascontiguousarray(modes[act]), out)
        shift = np.sqrt(((out - modes[act]) ** 2).sum(axis=1))
        modes[act] = out
        frozen[act] = shift <= tol
        modes, seed_to_mode, frozen = _dedup(modes, seed_to_mode, frozen)

    # modes a, b merge when within min(h_a, h_b) / 2, where a mode's
    # bandwidth is the smallest bandwidth among the seeds it absorbed
    mode_h = np.full(modes.shape[0], np.inf)
    np.minimum.at(mode_h, seed_to_mode, h)
    reps: list[np.ndarray] = []
    rep_h: list[float] = []
    mode_label = np.empty(modes.shape[0], dtype=np.int64)
    rep_matrix = np.empty((0, X.shape[1]))
    for i in range(modes.shape[0]):
        if reps:
            d = np.sqrt(((rep_matrix - modes[i]) ** 2).sum(axis=1))
            radius = np.minimum(np.asarray(rep_h), mode_h[i]) / 2.0
            ok = d <= radius
            if ok.any():
                mode_label[i] = int(np.argmax(ok))
                continue
        reps.append(modes[i])
        rep_h.append(float(mode_h[i]))
        rep_matrix = np.vstack(reps)
        mode_label[i] = len(reps) - 1
    labels = mode_label[seed_to_mode]
    # renumber by first appearance in row order
    from ..core import relabel_contiguous

    fit_seconds = time.perf_counter() - t0
    return ClusterAssignment(
        Algorithm.MSAMS,
        relabel_contiguous(labels),
        {"k_bandwidth": float(k_bandwidth)},
        fit_seconds,
    )
