"""Gaussian mixture fitted by EM with full covariances.

Initialization comes from a k-means run with the same seed, so the whole
fit is deterministic. Covariances are regularized only on demand: if an
M-step covariance loses positive definiteness an escalating diagonal ridge
(starting at 1e-6 of the mean diagonal) is applied; well-conditioned fits
report exact maximum-likelihood covariances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..core import Algorithm, ClusterAssignment, RunSeed
from ..errors import NumericalError, ParameterError
from .common import as_matrix
from .kmeans import _contiguous, kmeans

_LOG2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class GmmModel:
    weights: np.ndarray           # (k,), sums to 1
    means: np.ndarray             # (k, d)
    covariances: np.ndarray       # (k, d, d), SPD
    log_likelihood: float         # total over rows
    iterations: int
    ll_history: tuple[float, ...]  # total log-likelihood per iteration


def _chol_with_ridge(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cholesky factor, adding an escalating diagonal ridge only if needed."""
    d = cov.shape[0]
    ridge = 0.0
    base = max(float(np.trace(cov)) / d, 1e-12)
    for attempt in range(10):
        try:
            L = np.linalg.cholesky(cov + ridge * np.eye(d))
            return L, cov + ridge * np.eye(d)
        except np.linalg.LinAlgError:
            ridge = base * 1e-6 * (10.0 ** attempt) if ridge == 0.0 else ridge * 10.0
    raise NumericalError(
        "covariance collapse: a component covariance stayed non-SPD after "
        f"ridge escalation up to {ridge:g}"
    )


def _component_log_prob(X, mean, L) -> np.ndarray:
    d = X.shape[1]
    diff = X - mean
    # solve L z = diff^T by forward substitution; d is small
    z = np.linalg.solve(L, diff.T)
    maha = np.einsum("ij,ij->j", z, z)
    logdet = 2.0 * float(np.log(np.diag(L)).sum())
    return -0.5 * (d * _LOG2PI + logdet + maha)


def gmm_em(
    X,
    k: int,
    seed: RunSeed,
    max_iter: int = 200,
    tol: float = 1e-7,
) -> tuple[GmmModel, ClusterAssignment]:
    """EM until the per-row log-likelihood gain drops below tol. Labels are
    the argmax responsibility per row."""
    X = as_matrix(X)
    n, d = X.shape
    if not 1 <= k <= n:
        raise ParameterError(f"k={k} must lie in [1, n={n}]")
    if n <= d:
        raise ParameterError(f"need more rows ({n}) than dimensions ({d})")
    t0 = time.perf_counter()
    _, km = kmeans(X, k, seed)
    init_labels = km.labels
    weights = np.empty(k)
    means = np.empty((k, d))
    covs = np.empty((k, d, d))
    for j in range(k):
        members = X[init_labels == j]
        if members.shape[0] == 0:
            members = X
        weights[j] = max(members.shape[0], 1) / n
        means[j] = members.mean(axis=0)
        diff = members - means[j]
        covs[j] = (diff.T @ diff) / members.shape[0]
    weights /= weights.sum()

    history: list[float] = []
    resp = np.empty((n, k))
    for it in range(1, max_iter + 1):
        # E step
        log_prob = np.empty((n, k))
        chols = []
        for j in range(k):
            L, covs[j] = _chol_with_ridge(covs[j])
            chols.append(L)
            log_prob[:, j] = _component_log_prob(X, means[j], L) + np.log(weights[j])
        m = log_prob.max(axis=1)
        lse = m + np.log(np.exp(log_prob - m[:, None]).sum(axis=1))
        ll = float(lse.sum())
        history.append(ll)
        resp = np.exp(log_prob - lse[:, None])
        if it > 1 and (history[-1] - history[-2]) / n < tol:
            break
        # M step
        nk = resp.sum(axis=0)
        nk = np.maximum(nk, 1e-300)
        weights = nk / n
        means = (resp.T @ X) / nk[:, None]
        for j in range(k):
            diff = X - means[j]
            covs[j] = (diff.T @ (diff * resp[:, j : j + 1])) / nk[j]
    labels = np.argmax(resp, axis=1).astype(np.int64)
    fit_seconds = time.perf_counter() - t0
    model = GmmModel(weights, means, covs, history[-1], it, tuple(history))
    assignment = ClusterAssignment(
        Algorithm.GMM, _contiguous(labels), {"k": float(k)}, fit_seconds
    )
    return model, assignment
