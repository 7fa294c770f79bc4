"""RBF-kernel support vector classifier trained by SMO."""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import DegenerateLabelsError
from ._kernels import smo_rbf_train

_CACHE_BYTES = 384 * 1024 * 1024


class SVC:
    """C-SVM with an RBF kernel, gamma = 1 / (d * mean feature variance).

    The dual is solved by single-pair SMO with maximal-violating-pair
    selection (second-order partner choice) and a kernel-row cache; training
    stops when the largest KKT violation falls below tol.
    """

    def __init__(self, c: float = 1.0, tol: float = 1e-3, max_pairs: int | None = None):
        self.c = c
        self.tol = tol
        self.max_pairs = max_pairs
        self.support_: np.ndarray | None = None
        self.dual_coef_: np.ndarray | None = None   # alpha_i * s_i on support
        self.alpha_: np.ndarray | None = None
        self.intercept_ = 0.0
        self.gamma_ = 0.0
        self.kkt_violation_ = np.inf
        self.pairs_done_ = 0

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y)
        if len(np.unique(y)) < 2:
            raise DegenerateLabelsError("SVC needs both classes")
        s = np.where(y > 0, 1.0, -1.0)
        n, d = X.shape
        mean_var = float(X.var(axis=0).mean())
        self.gamma_ = 1.0 / (d * mean_var) if mean_var > 0 else 1.0
        max_pairs = self.max_pairs if self.max_pairs is not None else max(200_000, 20 * n)
        cache_rows = int(min(n, max(2, _CACHE_BYTES // (8 * n))))
        alpha, bias, pairs, viol = smo_rbf_train(
            X, s, float(self.c), self.gamma_, float(self.tol), max_pairs, cache_rows
        )
        if viol > self.tol:
            warnings.warn(
                f"SMO stopped at {pairs} pair updates with KKT violation "
                f"{viol:.3g} > tol {self.tol:g}",
                stacklevel=2,
            )
        self.alpha_ = alpha
        self.kkt_violation_ = float(viol)
        self.pairs_done_ = int(pairs)
        self.intercept_ = float(bias)
        sv = alpha > 1e-12
        self.support_ = X[sv].copy()
        self.dual_coef_ = (alpha[sv] * s[sv]).copy()
        return self

    def decision_function(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if self.support_.shape[0] == 0:
            return np.full(X.shape[0], self.intercept_)
        out = np.empty(X.shape[0])
        sv = self.support_
        sv_sq = np.einsum("ij,ij->i", sv, sv)
        chunk = max(1, int(4_000_000 // max(sv.shape[0], 1)))
        for a in range(0, X.shape[0], chunk):
            blk = X[a : a + chunk]
            d2 = (
                np.einsum("ij,ij->i", blk, blk)[:, None]
                + sv_sq[None, :]
                - 2.0 * (blk @ sv.T)
            )
            np.maximum(d2, 0.0, out=d2)
            out[a : a + chunk] = np.exp(-self.gamma_ * d2) @ self.dual_coef_
        return out + self.intercept_

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)
