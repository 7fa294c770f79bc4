"""Gaussian naive Bayes."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateLabelsError


class GaussianNB:
    """Per-class feature means and maximum-likelihood (1/N) variances.

    `var_` holds the raw MLE variances; prediction uses `var_smoothed_`,
    which adds var_smoothing times the largest overall feature variance for
    numerical safety.
    """

    def __init__(self, var_smoothing: float = 1e-9):
        self.var_smoothing = var_smoothing
        self.classes_ = np.array([0, 1])
        self.theta_: np.ndarray | None = None       # (2, d) means
        self.var_: np.ndarray | None = None         # (2, d) MLE variances
        self.var_smoothed_: np.ndarray | None = None
        self.log_prior_: np.ndarray | None = None

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y)
        counts = np.array([(y == c).sum() for c in (0, 1)], dtype=np.float64)
        if (counts == 0).any():
            raise DegenerateLabelsError("GaussianNB needs both classes")
        self.theta_ = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
        self.var_ = np.vstack([X[y == c].var(axis=0) for c in (0, 1)])
        eps = self.var_smoothing * float(X.var(axis=0).max())
        self.var_smoothed_ = self.var_ + eps
        self.log_prior_ = np.log(counts / counts.sum())
        return self

    def _joint_log_likelihood(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.empty((X.shape[0], 2))
        for c in (0, 1):
            var = self.var_smoothed_[c]
            diff = X - self.theta_[c]
            out[:, c] = (
                self.log_prior_[c]
                - 0.5 * np.sum(np.log(2.0 * np.pi * var))
                - 0.5 * np.sum(diff * diff / var, axis=1)
            )
        return out

    def predict(self, X) -> np.ndarray:
        jll = self._joint_log_likelihood(X)
        return (jll[:, 1] > jll[:, 0]).astype(np.int64)
