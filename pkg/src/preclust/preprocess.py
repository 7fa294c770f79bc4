"""Row cleaning, correlation pruning, ANOVA feature selection, z-score
standardization, and NORMAL-label derivation.

Ordering matters and is deliberate: invalid rows are dropped first, then
highly correlated columns (|r| above the threshold, later column loses),
then ANOVA against the binary NORMAL target removes non-discriminating
columns, and finally the surviving columns are standardized. ANOVA runs on
unstandardized data; the F statistic is scale invariant so the order is
immaterial, but it is fixed here for reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import LabelVector, NocSchedule, SensorFrame, as_labels, f_survival
from .errors import (
    DegenerateLabelsError,
    EmptyDataError,
    InsufficientDataError,
)
from .ingest import atomic_write_text

DEFAULT_CORR_THRESHOLD = 0.8
DEFAULT_ANOVA_ALPHA = 0.05


@dataclass
class FeatureRecord:
    name: str
    dropped_by_correlation: bool = False
    correlation_partner: str | None = None
    f_value: float | None = None
    p_value: float | None = None
    constant: bool = False
    kept: bool = False

    @property
    def dropped_by(self) -> str:
        if self.dropped_by_correlation:
            return self.correlation_partner or "correlation"
        if self.constant:
            return "constant"
        if self.p_value is not None and not self.kept:
            return "anova"
        return ""


@dataclass
class FeatureReport:
    """Per-feature bookkeeping across the selection stages."""

    records: dict[str, FeatureRecord] = field(default_factory=dict)

    def record(self, name: str) -> FeatureRecord:
        if name not in self.records:
            self.records[name] = FeatureRecord(name)
        return self.records[name]

    def kept_names(self) -> list[str]:
        return [r.name for r in self.records.values() if r.kept]

    def to_csv(self, path) -> None:
        lines = ["feature,f_value,p_value,dropped_by,kept"]
        for r in self.records.values():
            f = "" if r.f_value is None else "%.17g" % r.f_value
            p = "" if r.p_value is None else "%.17g" % r.p_value
            lines.append(f"{r.name},{f},{p},{r.dropped_by},{int(r.kept)}")
        atomic_write_text(path, "\n".join(lines) + "\n")


def drop_invalid_rows(frame: SensorFrame) -> SensorFrame:
    """Remove every row containing a missing or non-finite cell."""
    bad = ~np.isfinite(frame.values).all(axis=1)
    if frame.missing is not None:
        bad |= frame.missing.any(axis=1)
    if bad.all():
        raise EmptyDataError("every row contains missing or invalid data")
    if not bad.any():
        return SensorFrame(frame.timestamps, frame.feature_names, frame.values)
    keep = ~bad
    return SensorFrame(frame.timestamps[keep], frame.feature_names, frame.values[keep])


def correlation_matrix(frame: SensorFrame) -> np.ndarray:
    """Pairwise Pearson correlation. Diagonal is exactly 1; constant columns
    correlate 0 with everything else."""
    X = frame.values
    if X.shape[0] < 2:
        raise InsufficientDataError("correlation needs at least 2 rows")
    Xc = X - X.mean(axis=0)
    sd = np.sqrt(np.einsum("ij,ij->j", Xc, Xc))
    const = sd == 0.0
    sd_safe = np.where(const, 1.0, sd)
    R = (Xc.T @ Xc) / np.outer(sd_safe, sd_safe)
    R[const, :] = 0.0
    R[:, const] = 0.0
    np.clip(R, -1.0, 1.0, out=R)
    np.fill_diagonal(R, 1.0)
    return R


def prune_correlated(
    frame: SensorFrame,
    threshold: float = DEFAULT_CORR_THRESHOLD,
    report: FeatureReport | None = None,
) -> tuple[SensorFrame, FeatureReport]:
    """Greedy pair scan in column order: whenever |r(i, j)| > threshold for
    i < j and column j is still alive, drop j and record i as its partner.
    The earlier column always survives the pair."""
    if not (0.0 < threshold <= 1.0):
        raise ValueError("threshold must lie in (0, 1]")
    report = report or FeatureReport()
    for name in frame.feature_names:
        report.record(name)
    R = correlation_matrix(frame)
    p = frame.n_features
    dropped = np.zeros(p, dtype=bool)
    for i in range(p):
        for j in range(i + 1, p):
            if dropped[j]:
                continue
            if abs(R[i, j]) > threshold:
                dropped[j] = True
                rec = report.record(frame.feature_names[j])
                rec.dropped_by_correlation = True
                rec.correlation_partner = frame.feature_names[i]
    keep = [n for n, d in zip(frame.feature_names, dropped) if not d]
    return frame.select_columns(keep), report


def anova_select(
    frame: SensorFrame,
    labels: LabelVector | np.ndarray,
    alpha: float = DEFAULT_ANOVA_ALPHA,
    report: FeatureReport | None = None,
) -> tuple[SensorFrame, FeatureReport]:
    """One-way ANOVA of each feature against the two NORMAL/ABNORMAL groups;
    features whose p-value is >= alpha are removed."""
    y = as_labels(labels, frame.n_rows)
    report = report or FeatureReport()
    n0 = int((y == 0).sum())
    n1 = int((y == 1).sum())
    if n0 == 0 or n1 == 0:
        raise DegenerateLabelsError("ANOVA needs both classes present")
    X = frame.values
    n = n0 + n1
    grand = X.mean(axis=0)
    m0 = X[y == 0].mean(axis=0)
    m1 = X[y == 1].mean(axis=0)
    ssb = n0 * (m0 - grand) ** 2 + n1 * (m1 - grand) ** 2
    sst = np.einsum("ij,ij->j", X - grand, X - grand)
    ssw = np.maximum(sst - ssb, 0.0)
    keep_names = []
    for j, name in enumerate(frame.feature_names):
        rec = report.record(name)
        if ssb[j] == 0.0:
            f, p = 0.0, 1.0
        elif ssw[j] == 0.0:
            f, p = float("inf"), 0.0
        else:
            f = float((ssb[j] / 1.0) / (ssw[j] / (n - 2)))
            p = f_survival(f, 1.0, float(n - 2))
        rec.f_value = f
        rec.p_value = p
        if p < alpha:
            rec.kept = True
            keep_names.append(name)
        else:
            rec.kept = False
    return frame.select_columns(keep_names), report


@dataclass(frozen=True)
class Standardizer:
    """Per-feature mean and population (1/N) standard deviation."""

    feature_names: tuple[str, ...]
    means: np.ndarray
    stddevs: np.ndarray

    def to_csv(self, path) -> None:
        lines = ["feature,mean,stddev"]
        for n, m, s in zip(self.feature_names, self.means, self.stddevs):
            lines.append(f"{n},{'%.17g' % m},{'%.17g' % s}")
        atomic_write_text(path, "\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "Standardizer":
        import csv

        with open(path, "r", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        names, means, sds = [], [], []
        for row in rows[1:]:
            names.append(row[0])
            means.append(float(row[1]))
            sds.append(float(row[2]))
        return cls(tuple(names), np.asarray(means), np.asarray(sds))


def fit_standardizer(
    frame: SensorFrame, report: FeatureReport | None = None
) -> Standardizer:
    """Fit per-column mean/stddev. Constant columns cannot be standardized;
    they are excluded (and flagged in the report) rather than raising."""
    X = frame.values
    means = X.mean(axis=0)
    sds = X.std(axis=0)
    keep = sds > 0.0
    if report is not None:
        for name, k in zip(frame.feature_names, keep):
            if not k:
                rec = report.record(name)
                rec.constant = True
                rec.kept = False
    names = tuple(n for n, k in zip(frame.feature_names, keep) if k)
    return Standardizer(names, means[keep].copy(), sds[keep].copy())


def apply_standardizer(frame: SensorFrame, s: Standardizer) -> SensorFrame:
    sub = frame.select_columns(s.feature_names)
    vals = (sub.values - s.means) / s.stddevs
    return SensorFrame(sub.timestamps, s.feature_names, vals)


def invert_standardizer(frame: SensorFrame, s: Standardizer) -> SensorFrame:
    sub = frame.select_columns(s.feature_names)
    vals = sub.values * s.stddevs + s.means
    return SensorFrame(sub.timestamps, s.feature_names, vals)


def label_from_noc(frame: SensorFrame, schedule: NocSchedule) -> LabelVector:
    """1 where the row timestamp falls inside a schedule interval, else 0."""
    return LabelVector(schedule.contains(frame.timestamps).astype(np.int64))


@dataclass(frozen=True)
class PreprocessResult:
    frame: SensorFrame            # standardized, selected columns
    labels: LabelVector
    report: FeatureReport
    standardizer: Standardizer


def preprocess(
    frame: SensorFrame,
    schedule: NocSchedule,
    corr_threshold: float = DEFAULT_CORR_THRESHOLD,
    anova_alpha: float = DEFAULT_ANOVA_ALPHA,
) -> PreprocessResult:
    """The full cleaning/selection/standardization pass."""
    clean = drop_invalid_rows(frame)
    labels = label_from_noc(clean, schedule)
    pruned, report = prune_correlated(clean, corr_threshold)
    selected, report = anova_select(pruned, labels, anova_alpha, report)
    std = fit_standardizer(selected, report)
    out = apply_standardizer(selected, std)
    for name in std.feature_names:
        report.record(name).kept = True
    return PreprocessResult(out, labels, report, std)
