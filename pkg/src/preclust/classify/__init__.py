"""The six classifier families with default parameters, stratified
cross-validation, and per-run metrics."""

from .bayes import GaussianNB
from .knn import KNeighborsClassifier
from .linear import LogisticRegression
from .metrics import (
    REPORT_CSV_HEADER,
    ClassificationReport,
    evaluate,
    mean_report,
    report_csv_row,
    with_train,
)
from .svm import SVC
from .trees import (
    DecisionTreeClassifier,
    GradientBoostingClassifier,
    RandomForestClassifier,
    RegressionTree,
)
from .validation import (
    ALL_KINDS,
    KIND_SHORT,
    ClassifierConfig,
    ClassifierKind,
    CrossValResult,
    TrainedModel,
    cross_validate,
    make_classifier,
    predict,
    single_split_validate,
    stratified_kfold,
    stratified_split,
    train,
)

__all__ = [
    "ALL_KINDS",
    "KIND_SHORT",
    "REPORT_CSV_HEADER",
    "ClassificationReport",
    "ClassifierConfig",
    "ClassifierKind",
    "CrossValResult",
    "DecisionTreeClassifier",
    "GaussianNB",
    "GradientBoostingClassifier",
    "KNeighborsClassifier",
    "LogisticRegression",
    "RandomForestClassifier",
    "RegressionTree",
    "SVC",
    "TrainedModel",
    "cross_validate",
    "evaluate",
    "make_classifier",
    "mean_report",
    "predict",
    "report_csv_row",
    "single_split_validate",
    "stratified_kfold",
    "stratified_split",
    "train",
    "with_train",
]
