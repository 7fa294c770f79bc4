"""Decision trees and the ensembles built on them.

The classification tree does exhaustive weighted-Gini splits (bootstrap
resampling is expressed as integer sample weights, so a forest shares one
feature matrix). The regression tree powers gradient boosting with
variance-reduction splits and per-leaf Newton updates on the logistic
loss.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateLabelsError
from ._kernels import (
    grow_regression_tree_levelwise,
    node_best_split_gini,
    node_best_split_sse,
)


def presort_columns(X: np.ndarray) -> np.ndarray:
    """(d, n) stable per-feature row orderings for level-wise tree growth."""
    return np.vstack([np.argsort(X[:, f], kind="stable") for f in range(X.shape[1])])


class _TreeArrays:
    """Flat array representation: internal nodes route on (feature,
    threshold); leaves carry a value (class-1 probability or regression
    output)."""

    __slots__ = ("feature", "threshold", "left", "right", "value", "impurity", "n_node")

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []
        self.impurity: list[float] = []
        self.n_node: list[int] = []

    def add(self, feature=-1, threshold=0.0, value=0.0, impurity=0.0, n=0) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        self.impurity.append(impurity)
        self.n_node.append(n)
        return len(self.feature) - 1

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index per row, routed iteratively by frontier."""
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            internal = feature[node] >= 0
            if not internal.any():
                return node
            idx = np.flatnonzero(internal)
            f = feature[node[idx]]
            goes_left = X[idx, f] <= threshold[node[idx]]
            node[idx] = np.where(goes_left, left[node[idx]], right[node[idx]])

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.value)[self.apply(X)]


class DecisionTreeClassifier:
    """Binary CART with Gini impurity, optional per-split feature
    subsampling, and optional integer sample weights."""

    def __init__(self, max_depth=None, min_samples_split=2, max_features=None, rng=None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.rng = rng
        self.tree = _TreeArrays()

    def fit(self, X, y, sample_weight=None):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        n, d = X.shape
        w = np.ones(n) if sample_weight is None else np.ascontiguousarray(sample_weight, dtype=np.float64)
        rows0 = np.flatnonzero(w > 0).astype(np.int64)
        all_feats = np.arange(d, dtype=np.int64)
        k_feats = self.max_features or d
        stack = [(rows0, 0, None, False)]
        # nodes are created parent-first so `left`/`right` back-patching works
        order = []
        while stack:
            rows, depth, parent, is_right = stack.pop()
            wsum = w[rows].sum()
            w1 = float((w[rows] * y[rows]).sum())
            prob = w1 / wsum
            gini = 1.0 - prob * prob - (1.0 - prob) ** 2
            node = self.tree.add(value=prob, impurity=gini, n=rows.size)
            if parent is not None:
                if is_right:
                    self.tree.right[parent] = node
                else:
                    self.tree.left[parent] = node
            if (
                rows.size < self.min_samples_split
                or gini <= 0.0
                or (self.max_depth is not None and depth >= self.max_depth)
            ):
                continue
            if k_feats < d:
                feats = np.sort(self.rng.choice(d, size=k_feats, replace=False)).astype(np.int64)
            else:
                feats = all_feats
            f, thr, gain, _ = node_best_split_gini(X, rows, w, y, feats)
            if f < 0:
                continue
            self.tree.feature[node] = int(f)
            self.tree.threshold[node] = float(thr)
            mask = X[rows, f] <= thr
            # right child pushed first so the left subtree materializes first
            stack.append((rows[~mask], depth + 1, node, True))
            stack.append((rows[mask], depth + 1, node, False))
            order.append(node)
        return self

    def predict_proba1(self, X) -> np.ndarray:
        return self.tree.predict_value(np.ascontiguousarray(X, dtype=np.float64))

    def predict(self, X) -> np.ndarray:
        # a tied leaf votes for the abnormal class (0)
        return (self.predict_proba1(X) > 0.5).astype(np.int64)


class RegressionTree:
    """Variance-reduction CART for real-valued targets (the boosting base
    learner). Grown level-wise from per-feature presorted row orders, which
    a boosting loop computes once and reuses across stages."""

    def __init__(self, max_depth=3, min_samples_split=2):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.tree = _TreeArrays()
        self.leaf_rows: dict[int, np.ndarray] = {}

    def fit(self, X, g, presorted=None):
        X = np.ascontiguousarray(X, dtype=np.float64)
        g = np.ascontiguousarray(g, dtype=np.float64)
        if presorted is None:
            presorted = presort_columns(X)
        feature, threshold, left, right, node_of = grow_regression_tree_levelwise(
            X, presorted, g, self.max_depth, self.min_samples_split
        )
        self.tree = _TreeArrays()
        for node in range(feature.shape[0]):
            self.tree.add(feature=int(feature[node]), threshold=float(threshold[node]))
            self.tree.left[node] = int(left[node])
            self.tree.right[node] = int(right[node])
        for leaf in np.unique(node_of):
            rows = np.flatnonzero(node_of == leaf)
            self.leaf_rows[int(leaf)] = rows
            self.tree.value[int(leaf)] = float(g[rows].mean())
        return self

    def set_leaf_values(self, values: dict[int, float]):
        for leaf, v in values.items():
            self.tree.value[leaf] = v

    def predict(self, X) -> np.ndarray:
        return self.tree.predict_value(np.ascontiguousarray(X, dtype=np.float64))


class RandomForestClassifier:
    """Bagged Gini trees with sqrt(d) features per split and hard majority
    voting (ties vote abnormal)."""

    def __init__(self, n_trees=100, min_samples_split=2, rng=None):
        self.n_trees = n_trees
        self.min_samples_split = min_samples_split
        self.rng = rng or np.random.default_rng(0)
        self.trees_: list[DecisionTreeClassifier] = []

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, d = X.shape
        if len(np.unique(y)) < 2:
            raise DegenerateLabelsError("random forest needs both classes")
        k = max(1, int(np.sqrt(d)))
        self.trees_ = []
        for _ in range(self.n_trees):
            draw = self.rng.integers(0, n, size=n)
            weight = np.bincount(draw, minlength=n).astype(np.float64)
            tree = DecisionTreeClassifier(
                max_depth=None,
                min_samples_split=self.min_samples_split,
                max_features=k,
                rng=self.rng,
            )
            tree.fit(X, y, sample_weight=weight)
            self.trees_.append(tree)
        return self

    def tree_votes(self, X) -> np.ndarray:
        """(n_trees, n_rows) hard per-tree predictions."""
        return np.vstack([t.predict(X) for t in self.trees_])

    def predict(self, X) -> np.ndarray:
        votes = self.tree_votes(X).sum(axis=0)
        return (votes * 2 > self.n_trees).astype(np.int64)


class GradientBoostingClassifier:
    """Stagewise boosting of depth-limited regression trees on the logistic
    loss, with per-leaf Newton steps, learning rate 0.1, 100 stages."""

    def __init__(
        self,
        n_stages=100,
        learning_rate=0.1,
        max_depth=3,
        subsample=1.0,
        rng=None,
    ):
        self.n_stages = n_stages
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.subsample = subsample
        self.rng = rng or np.random.default_rng(0)
        self.trees_: list[RegressionTree] = []
        self.f0_ = 0.0
        self.loss_history_: list[float] = []

    @staticmethod
    def _nll(y, F):
        # log(1 + e^F) - y F, computed stably
        return float(np.sum(np.logaddexp(0.0, F) - y * F))

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n = X.shape[0]
        p_bar = float(y.mean())
        if p_bar <= 0.0 or p_bar >= 1.0:
            raise DegenerateLabelsError("boosting needs both classes")
        self.f0_ = float(np.log(p_bar / (1.0 - p_bar)))
        F = np.full(n, self.f0_)
        self.trees_ = []
        self.loss_history_ = [self._nll(y, F)]
        presorted = presort_columns(X) if self.subsample >= 1.0 else None
        for _ in range(self.n_stages):
            p = 1.0 / (1.0 + np.exp(-F))
            resid = y - p
            if self.subsample < 1.0:
                m = max(1, int(round(self.subsample * n)))
                rows = np.sort(self.rng.choice(n, size=m, replace=False))
                Xs, rs = X[rows], resid[rows]
            else:
                rows = None
                Xs, rs = X, resid
            tree = RegressionTree(max_depth=self.max_depth).fit(Xs, rs, presorted=presorted)
            # Newton leaf values: sum(residual) / sum(p (1-p))
            hess = p * (1.0 - p) if rows is None else (p * (1.0 - p))[rows]
            res_fit = rs
            values = {}
            for leaf, leaf_rows in tree.leaf_rows.items():
                num = float(res_fit[leaf_rows].sum())
                den = float(hess[leaf_rows].sum())
                values[leaf] = num / max(den, 1e-12)
            tree.set_leaf_values(values)
            F = F + self.learning_rate * tree.predict(X)
            self.trees_.append(tree)
            self.loss_history_.append(self._nll(y, F))
        return self

    def decision_function(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        F = np.full(X.shape[0], self.f0_)
        for tree in self.trees_:
            F += self.learning_rate * tree.predict(X)
        return F

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)
