"""Classification metrics around a 2x2 confusion matrix.

Fault detection orients the positive class as ABNORMAL (0): FP = a normal
observation flagged abnormal, FN = a missed abnormality. Macro and
support-weighted recall/F1 are both kept, and the raw confusion matrix
makes either orientation recoverable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..core import as_labels
from ..errors import DimensionError


@dataclass(frozen=True)
class ClassificationReport:
    accuracy_train: float
    accuracy_test: float
    recall_macro: float
    recall_weighted: float
    f1_macro: float
    f1_weighted: float
    recall_abnormal: float
    f1_abnormal: float
    recall_normal: float
    f1_normal: float
    fp: int
    fn: int
    confusion: tuple[tuple[int, int], tuple[int, int]]   # rows true (0, 1), cols predicted
    train_seconds: float = 0.0

    @property
    def fp_normal_positive(self) -> int:
        """FP under the opposite orientation (positive = NORMAL)."""
        return self.confusion[0][1]

    @property
    def fn_normal_positive(self) -> int:
        return self.confusion[1][0]


def _prf(tp, fp_, fn_):
    denom_r = tp + fn_
    denom_p = tp + fp_
    recall = tp / denom_r if denom_r else 0.0
    precision = tp / denom_p if denom_p else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return recall, f1


def evaluate(y_true, y_pred) -> ClassificationReport:
    """Metrics part of a report, from hard test-set predictions."""
    t = as_labels(y_true)
    p = as_labels(y_pred)
    if t.shape[0] != p.shape[0]:
        raise DimensionError("prediction length mismatch")
    c = np.zeros((2, 2), dtype=np.int64)
    np.add.at(c, (t, p), 1)
    total = int(c.sum())
    accuracy = float((c[0, 0] + c[1, 1]) / total) if total else 0.0
    # class 0 = abnormal (the fault-detection positive), class 1 = normal
    r0, f10 = _prf(c[0, 0], c[1, 0], c[0, 1])
    r1, f11 = _prf(c[1, 1], c[0, 1], c[1, 0])
    support = c.sum(axis=1)
    wts = support / total if total else np.array([0.5, 0.5])
    return ClassificationReport(
        accuracy_train=float("nan"),
        accuracy_test=accuracy,
        recall_macro=(r0 + r1) / 2.0,
        recall_weighted=float(wts[0] * r0 + wts[1] * r1),
        f1_macro=(f10 + f11) / 2.0,
        f1_weighted=float(wts[0] * f10 + wts[1] * f11),
        recall_abnormal=r0,
        f1_abnormal=f10,
        recall_normal=r1,
        f1_normal=f11,
        fp=int(c[1, 0]),
        fn=int(c[0, 1]),
        confusion=((int(c[0, 0]), int(c[0, 1])), (int(c[1, 0]), int(c[1, 1]))),
    )


def with_train(report: ClassificationReport, accuracy_train: float, train_seconds: float) -> ClassificationReport:
    return replace(report, accuracy_train=accuracy_train, train_seconds=train_seconds)


def mean_report(reports: list[ClassificationReport]) -> ClassificationReport:
    """Field-wise mean across folds; confusion counts and FP/FN are summed
    (each observation is tested exactly once across folds)."""
    if not reports:
        raise ValueError("no reports to average")

    def m(attr):
        return float(np.mean([getattr(r, attr) for r in reports]))

    csum = np.sum([np.asarray(r.confusion) for r in reports], axis=0)
    return ClassificationReport(
        accuracy_train=m("accuracy_train"),
        accuracy_test=m("accuracy_test"),
        recall_macro=m("recall_macro"),
        recall_weighted=m("recall_weighted"),
        f1_macro=m("f1_macro"),
        f1_weighted=m("f1_weighted"),
        recall_abnormal=m("recall_abnormal"),
        f1_abnormal=m("f1_abnormal"),
        recall_normal=m("recall_normal"),
        f1_normal=m("f1_normal"),
        fp=int(sum(r.fp for r in reports)),
        fn=int(sum(r.fn for r in reports)),
        confusion=tuple(tuple(int(v) for v in row) for row in csum),
        train_seconds=m("train_seconds"),
    )


REPORT_CSV_HEADER = (
    "kind,enriched,fold,acc_train,acc_test,recall_macro,recall_weighted,"
    "f1_macro,f1_weighted,fp,fn,train_seconds"
)


def report_csv_row(kind: str, enriched: bool, fold, r: ClassificationReport,
                   include_times: bool = True) -> str:
    cells = [
        kind,
        str(int(enriched)),
        str(fold),
        "%.6f" % r.accuracy_train,
        "%.6f" % r.accuracy_test,
        "%.6f" % r.recall_macro,
        "%.6f" % r.recall_weighted,
        "%.6f" % r.f1_macro,
        "%.6f" % r.f1_weighted,
        str(r.fp),
        str(r.fn),
    ]
    if include_times:
        cells.append("%.6f" % r.train_seconds)
    return ",".join(cells)
