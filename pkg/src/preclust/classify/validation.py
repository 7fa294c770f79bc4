"""Classifier factory, stratified splitting, and cross-validation."""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..core import RunSeed, as_labels
from ..enrich import smote
from ..errors import DegenerateLabelsError, DimensionError, ParameterError
from .bayes import GaussianNB
from .knn import KNeighborsClassifier
from .linear import LogisticRegression
from .metrics import ClassificationReport, evaluate, mean_report, with_train
from .svm import SVC
from .trees import GradientBoostingClassifier, RandomForestClassifier


class ClassifierKind(str, Enum):
    LOGISTIC_REGRESSION = "logistic_regression"
    SVC_RBF = "svc_rbf"
    GAUSSIAN_NB = "gaussian_nb"
    GRADIENT_BOOSTING = "gradient_boosting"
    KNN = "knn"
    RANDOM_FOREST = "random_forest"

    def __str__(self):  # pragma: no cover - cosmetic
        return self.value


ALL_KINDS = tuple(ClassifierKind)

#: Table-2-style short names
KIND_SHORT = {
    ClassifierKind.LOGISTIC_REGRESSION: "LR",
    ClassifierKind.SVC_RBF: "SVC",
    ClassifierKind.GAUSSIAN_NB: "GaussNB",
    ClassifierKind.GRADIENT_BOOSTING: "GBM",
    ClassifierKind.KNN: "KNN",
    ClassifierKind.RANDOM_FOREST: "RF",
}


@dataclass(frozen=True)
class ClassifierConfig:
    """The library defaults every kind is run with unless overridden."""

    lr_c: float = 1.0
    lr_tol: float = 1e-6
    lr_max_iter: int = 1000
    svc_c: float = 1.0
    svc_tol: float = 1e-3
    svc_max_pairs: int | None = None
    gnb_var_smoothing: float = 1e-9
    gbm_stages: int = 100
    gbm_learning_rate: float = 0.1
    gbm_max_depth: int = 3
    gbm_subsample: float = 1.0
    knn_k: int = 5
    rf_trees: int = 100
    rf_min_samples_split: int = 2


def make_classifier(kind: ClassifierKind, rng: np.random.Generator,
                    config: ClassifierConfig = ClassifierConfig()):
    kind = ClassifierKind(kind)
    if kind is ClassifierKind.LOGISTIC_REGRESSION:
        return LogisticRegression(config.lr_c, config.lr_tol, config.lr_max_iter)
    if kind is ClassifierKind.SVC_RBF:
        return SVC(config.svc_c, config.svc_tol, config.svc_max_pairs)
    if kind is ClassifierKind.GAUSSIAN_NB:
        return GaussianNB(config.gnb_var_smoothing)
    if kind is ClassifierKind.GRADIENT_BOOSTING:
        return GradientBoostingClassifier(
            config.gbm_stages,
            config.gbm_learning_rate,
            config.gbm_max_depth,
            config.gbm_subsample,
            rng,
        )
    if kind is ClassifierKind.KNN:
        return KNeighborsClassifier(config.knn_k)
    return RandomForestClassifier(config.rf_trees, config.rf_min_samples_split, rng)


@dataclass(frozen=True)
class TrainedModel:
    kind: ClassifierKind
    model: object
    train_seconds: float
    n_features: int = 0


def train(
    kind: ClassifierKind,
    X: np.ndarray,
    y,
    seed: RunSeed,
    invocation: int = 0,
    config: ClassifierConfig = ClassifierConfig(),
) -> TrainedModel:
    """Fit one classifier, timing the fit call only."""
    yv = as_labels(y)
    if len(np.unique(yv)) < 2:
        raise DegenerateLabelsError("training needs both classes present")
    kind = ClassifierKind(kind)
    rng = seed.rng(f"classify.{kind.value}", invocation)
    model = make_classifier(kind, rng, config)
    Xc = np.ascontiguousarray(X, dtype=np.float64)
    t0 = time.perf_counter()
    model.fit(Xc, yv)
    return TrainedModel(kind, model, time.perf_counter() - t0, Xc.shape[1])


def predict(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if model.n_features and X.shape[1] != model.n_features:
        raise DimensionError(
            f"model expects {model.n_features} columns, got {X.shape[1]}"
        )
    return model.model.predict(X)


def stratified_kfold(y, folds: int, seed: RunSeed) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint covering folds with per-class counts within 1 of
    proportional."""
    yv = as_labels(y)
    if folds < 2:
        raise ParameterError("folds must be >= 2")
    fold_members: list[list[np.ndarray]] = [[] for _ in range(folds)]
    rng = seed.rng("classify.stratified_kfold")
    for cls in np.unique(yv):
        idx = np.flatnonzero(yv == cls)
        if idx.size < folds:
            raise ParameterError(
                f"class {cls} has {idx.size} samples, fewer than {folds} folds"
            )
        idx = idx[rng.permutation(idx.size)]
        base, extra = divmod(idx.size, folds)
        at = 0
        for f in range(folds):
            take = base + (1 if f < extra else 0)
            fold_members[f].append(idx[at : at + take])
            at += take
    out = []
    all_idx = np.arange(yv.size)
    for f in range(folds):
        test = np.sort(np.concatenate(fold_members[f]))
        mask = np.ones(yv.size, dtype=bool)
        mask[test] = False
        out.append((all_idx[mask], test))
    return out


def stratified_split(y, test_fraction: float, seed: RunSeed) -> tuple[np.ndarray, np.ndarray]:
    """Single stratified train/test split (default 75/25 in the pipeline)."""
    yv = as_labels(y)
    if not 0.0 < test_fraction < 1.0:
        raise ParameterError("test_fraction must lie in (0, 1)")
    rng = seed.rng("classify.stratified_split")
    test_parts = []
    for cls in np.unique(yv):
        idx = np.flatnonzero(yv == cls)
        idx = idx[rng.permutation(idx.size)]
        take = int(round(test_fraction * idx.size))
        take = min(max(take, 1), idx.size - 1)
        test_parts.append(idx[:take])
    test = np.sort(np.concatenate(test_parts))
    mask = np.ones(yv.size, dtype=bool)
    mask[test] = False
    return np.arange(yv.size)[mask], test


@dataclass(frozen=True)
class CrossValResult:
    kind: ClassifierKind
    mean: ClassificationReport
    folds: tuple[ClassificationReport, ...]


def _fit_eval_fold(
    kind, X, yv, train_idx, test_idx, seed, invocation, smote_enabled, smote_k, config
) -> ClassificationReport:
    X_tr, y_tr = X[train_idx], yv[train_idx]
    if smote_enabled:
        X_tr, y_tr = smote(X_tr, y_tr, k=smote_k, seed=seed, invocation=invocation)
    model = train(kind, X_tr, y_tr, seed, invocation, config)
    pred_train = predict(model, X[train_idx])
    acc_train = float((pred_train == yv[train_idx]).mean())
    report = evaluate(yv[test_idx], predict(model, X[test_idx]))
    return with_train(report, acc_train, model.train_seconds)


def cross_validate(
    kind: ClassifierKind,
    X,
    y,
    folds: int,
    seed: RunSeed,
    smote_enabled: bool = True,
    smote_k: int = 5,
    config: ClassifierConfig = ClassifierConfig(),
) -> CrossValResult:
    """Per fold: optional SMOTE on the training partition, fit, evaluate on
    the train partition (pre-balancing rows) and the held-out fold. A failed
    fold aborts the whole run."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    yv = as_labels(y, X.shape[0])
    reports = []
    for f, (train_idx, test_idx) in enumerate(stratified_kfold(yv, folds, seed)):
        reports.append(
            _fit_eval_fold(
                kind, X, yv, train_idx, test_idx, seed, f, smote_enabled, smote_k, config
            )
        )
    return CrossValResult(ClassifierKind(kind), mean_report(reports), tuple(reports))


def single_split_validate(
    kind: ClassifierKind,
    X,
    y,
    test_fraction: float,
    seed: RunSeed,
    smote_enabled: bool = True,
    smote_k: int = 5,
    config: ClassifierConfig = ClassifierConfig(),
) -> CrossValResult:
    X = np.ascontiguousarray(X, dtype=np.float64)
    yv = as_labels(y, X.shape[0])
    train_idx, test_idx = stratified_split(yv, test_fraction, seed)
    report = _fit_eval_fold(kind, X, yv, train_idx, test_idx, seed, 0, smote_enabled, smote_k, config)
    return CrossValResult(ClassifierKind(kind), report, (report,))
