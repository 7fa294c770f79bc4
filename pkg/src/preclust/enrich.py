"""Feature-matrix augmentation with cluster labels, and SMOTE balancing.

Cluster ids are nominal, so the default encoding is one-hot indicator
columns per selected algorithm (`<algo>_c<label>`, plus `<algo>_noise`
when -1 occurs); a raw integer-id mode is kept behind a switch for
comparison. SMOTE interpolates new minority rows between minority nearest
neighbors until the classes balance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ALGORITHM_ORDER,
    ClusterAssignment,
    RunSeed,
    SensorFrame,
    as_labels,
    pairwise_sq_distances,
)
from .errors import DataError, DimensionError


@dataclass(frozen=True)
class EnrichedFrame:
    base: SensorFrame
    added_names: tuple[str, ...]
    added_values: np.ndarray                  # (n_rows, n_added)
    provenance: dict[str, tuple[str, ...]]    # algorithm -> its column names

    def to_frame(self) -> SensorFrame:
        return SensorFrame(
            self.base.timestamps,
            self.base.feature_names + self.added_names,
            np.hstack([self.base.values, self.added_values]),
        )

    @property
    def matrix(self) -> np.ndarray:
        return np.hstack([self.base.values, self.added_values])


def _algorithm_sort_key(a: ClusterAssignment) -> int:
    try:
        return ALGORITHM_ORDER.index(a.algorithm)
    except ValueError:
        return len(ALGORITHM_ORDER)


def augment(
    frame: SensorFrame,
    assignments: list[ClusterAssignment] | tuple[ClusterAssignment, ...],
    one_hot: bool = True,
) -> EnrichedFrame:
    """Append cluster-label columns for each selected assignment, in the
    fixed algorithm order. Base columns are never touched."""
    names: list[str] = []
    cols: list[np.ndarray] = []
    provenance: dict[str, tuple[str, ...]] = {}
    for a in sorted(assignments, key=_algorithm_sort_key):
        if a.labels.shape[0] != frame.n_rows:
            raise DimensionError(
                f"{a.algorithm.value}: {a.labels.shape[0]} labels for {frame.n_rows} rows"
            )
        tag = a.algorithm.value
        if not one_hot:
            col = f"{tag}_cluster"
            provenance[tag] = (col,)
            names.append(col)
            cols.append(a.labels.astype(np.float64))
            continue
        block_names = []
        for label in range(int(a.labels.max()) + 1 if (a.labels >= 0).any() else 0):
            block_names.append(f"{tag}_c{label}")
            cols.append((a.labels == label).astype(np.float64))
        if (a.labels < 0).any():
            block_names.append(f"{tag}_noise")
            cols.append((a.labels < 0).astype(np.float64))
        provenance[tag] = tuple(block_names)
        names.extend(block_names)
    added = np.column_stack(cols) if cols else np.zeros((frame.n_rows, 0))
    return EnrichedFrame(frame, tuple(names), added, provenance)


def smote(
    X,
    y,
    k: int = 5,
    seed: RunSeed = RunSeed(0),
    invocation: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Oversample the minority class to parity.

    Each synthetic row is x + u * (x_nn - x) for a uniformly drawn u in
    [0, 1] and x_nn one of x's k nearest minority neighbors. Originals come
    first, unchanged and in order; synthetics are appended.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    lab = as_labels(y, X.shape[0])
    if k < 1:
        raise ValueError("k must be >= 1")
    n0 = int((lab == 0).sum())
    n1 = int((lab == 1).sum())
    if n0 == n1:
        return X.copy(), lab.copy()
    minority = 0 if n0 < n1 else 1
    idx_min = np.flatnonzero(lab == minority)
    need = abs(n1 - n0)
    if idx_min.size < 2:
        raise DataError(
            "SMOTE needs at least 2 minority samples; collect more minority "
            "data or disable balancing"
        )
    k = min(k, idx_min.size - 1)
    Xm = X[idx_min]
    d2 = pairwise_sq_distances(Xm, Xm)
    np.fill_diagonal(d2, np.inf)
    nn = np.argpartition(d2, k - 1, axis=1)[:, :k]
    # stable neighbor order: sort the k chosen by (distance, index)
    rowwise = np.take_along_axis(d2, nn, axis=1)
    order = np.lexsort((nn, rowwise), axis=1)
    nn = np.take_along_axis(nn, order, axis=1)

    rng = seed.rng("enrich.smote", invocation)
    base_pos = np.arange(need) % idx_min.size
    pick = rng.integers(0, k, size=need)
    u = rng.random(need)
    bases = Xm[base_pos]
    neighbors = Xm[nn[base_pos, pick]]
    synth = bases + u[:, None] * (neighbors - bases)
    X_out = np.vstack([X, synth])
    y_out = np.concatenate([lab, np.full(need, minority, dtype=np.int64)])
    return X_out, y_out
