"""k-nearest-neighbor classifier with brute-force chunked distances."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from ._kernels import knn_vote_chunk


class KNeighborsClassifier:
    """Euclidean k-NN majority vote; vote ties go to the abnormal class
    (0), neighbor-distance ties at the k-th position to the lower row
    index. The inner-product block per query chunk stays in BLAS and is
    consumed in a single fused selection pass."""

    def __init__(self, k: int = 5):
        self.k = k
        self._X: np.ndarray | None = None
        self._y: np.ndarray | None = None
        self._sq: np.ndarray | None = None

    def fit(self, X, y):
        self._X = np.ascontiguousarray(X, dtype=np.float64)
        self._y = np.asarray(y, dtype=np.int64)
        self._sq = np.einsum("ij,ij->i", self._X, self._X)
        if self.k > len(self._y):
            raise ParameterError(f"k={self.k} larger than training set {len(self._y)}")
        return self

    def predict(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        n_ref = self._X.shape[0]
        k = min(self.k, n_ref)
        out = np.empty(X.shape[0], dtype=np.int64)
        votes = np.empty(X.shape[0], dtype=np.int64)
        chunk = max(1, int(24_000_000 // max(n_ref, 1)))
        refs_t = self._X.T.copy()
        for a in range(0, X.shape[0], chunk):
            blk = X[a : a + chunk]
            G = blk @ refs_t
            sq_q = np.einsum("ij,ij->i", blk, blk)
            knn_vote_chunk(G, sq_q, self._sq, self._y, k, votes[a : a + blk.shape[0]])
        np.multiply(votes, 2, out=out)
        return (out > k).astype(np.int64)
