"""L2-regularized logistic regression fitted by damped Newton (IRLS)."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateLabelsError, NumericalError


class LogisticRegression:
    """Minimizes sum log(1 + exp(-s z)) + ||w||^2 / (2 C) with s in {-1, 1}
    and z = X w + b; the intercept is unpenalized. Newton steps are halved
    until the objective decreases, so the loss history is non-increasing.
    """

    def __init__(self, c: float = 1.0, tol: float = 1e-6, max_iter: int = 1000):
        self.c = c
        self.tol = tol
        self.max_iter = max_iter
        self.coef_: np.ndarray | None = None
        self.intercept_ = 0.0
        self.loss_history_: list[float] = []
        self.n_iter_ = 0

    def _objective(self, X, s, w, b):
        z = X @ w + b
        # log(1 + exp(-s z)) stably
        loss = float(np.sum(np.logaddexp(0.0, -s * z)))
        return loss + float(w @ w) / (2.0 * self.c)

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y)
        if len(np.unique(y)) < 2:
            raise DegenerateLabelsError("logistic regression needs both classes")
        s = np.where(y > 0, 1.0, -1.0)
        n, d = X.shape
        w = np.zeros(d)
        b = 0.0
        self.loss_history_ = [self._objective(X, s, w, b)]
        lam = 1.0 / self.c
        for it in range(1, self.max_iter + 1):
            z = X @ w + b
            p = 1.0 / (1.0 + np.exp(-z))          # P(class 1)
            y01 = (s + 1.0) / 2.0
            grad_w = X.T @ (p - y01) + lam * w
            grad_b = float(np.sum(p - y01))
            gmax = max(float(np.abs(grad_w).max(initial=0.0)), abs(grad_b))
            if gmax < self.tol:
                break
            r = np.maximum(p * (1.0 - p), 1e-12)
            Xw = X * r[:, None]
            H = np.empty((d + 1, d + 1))
            H[:d, :d] = X.T @ Xw + lam * np.eye(d)
            H[:d, d] = Xw.sum(axis=0)
            H[d, :d] = H[:d, d]
            H[d, d] = float(r.sum())
            g = np.concatenate([grad_w, [grad_b]])
            try:
                step = np.linalg.solve(H, g)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(f"singular IRLS system: {exc}") from exc
            scale = 1.0
            base = self.loss_history_[-1]
            for _ in range(40):
                w_new = w - scale * step[:d]
                b_new = b - scale * step[d]
                val = self._objective(X, s, w_new, b_new)
                if val <= base:
                    break
                scale *= 0.5
            w, b = w_new, b_new
            self.loss_history_.append(val)
            self.n_iter_ = it
        self.coef_ = w
        self.intercept_ = b
        return self

    def decision_function(self, X) -> np.ndarray:
        return np.ascontiguousarray(X, dtype=np.float64) @ self.coef_ + self.intercept_

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)
