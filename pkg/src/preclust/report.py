"""Paired with/without-enrichment comparison, significance testing, and
table/figure emission.

Accuracy deltas are (with - without); time deltas are (without - with) so a
positive value is a saving either way. The headline time statistic is the
mean per-kind relative reduction, reported alongside two alternative
aggregations (total-time reduction and mean raw difference) because no
single formula is canonical. Wall-clock content is kept out of the
deterministic artifacts: emit_report returns the timing rows for the
caller's timings file unless inline timing output is requested explicitly.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .classify import ALL_KINDS, KIND_SHORT, ClassificationReport, ClassifierKind
from .core import t_two_sided_p
from .errors import DegenerateStatisticsError
from .ingest import atomic_write_text
from . import svgplot


def paired_t_test(diffs) -> tuple[float, float]:
    """Two-sided paired Student t-test on a vector of differences."""
    d = np.asarray(diffs, dtype=np.float64)
    n = d.shape[0]
    if n < 2:
        raise DegenerateStatisticsError("need at least 2 paired differences")
    s = float(d.std(ddof=1))
    if s == 0.0:
        raise DegenerateStatisticsError("zero variance in paired differences")
    t = float(d.mean() / (s / math.sqrt(n)))
    return t, t_two_sided_p(t, n - 1)


def mean_accuracy_gain(pairs) -> float:
    """Arithmetic mean of (with - without) over accuracy pairs."""
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.size == 0:
        raise DegenerateStatisticsError("no accuracy pairs")
    return float(np.mean(arr[:, 0] - arr[:, 1]))


@dataclass(frozen=True)
class ComparisonReport:
    kinds: tuple[ClassifierKind, ...]
    with_reports: dict
    without_reports: dict
    accuracy_deltas: np.ndarray        # test accuracy, with - without
    time_deltas_seconds: np.ndarray    # train seconds, without - with
    mean_accuracy_gain: float
    mean_time_stat: float              # mean relative reduction
    t_accuracy: float
    p_accuracy: float
    t_time: float
    p_time: float
    time_stat_candidates: dict


def build_comparison(
    with_reports: dict[ClassifierKind, ClassificationReport],
    without_reports: dict[ClassifierKind, ClassificationReport],
) -> ComparisonReport:
    kinds = tuple(k for k in ALL_KINDS if k in with_reports and k in without_reports)
    if not kinds:
        raise DegenerateStatisticsError("no classifier kinds to compare")
    acc_d = np.array(
        [with_reports[k].accuracy_test - without_reports[k].accuracy_test for k in kinds]
    )
    time_d = np.array(
        [without_reports[k].train_seconds - with_reports[k].train_seconds for k in kinds]
    )
    rel = np.array(
        [
            (without_reports[k].train_seconds - with_reports[k].train_seconds)
            / without_reports[k].train_seconds
            if without_reports[k].train_seconds > 0
            else 0.0
            for k in kinds
        ]
    )
    total_without = float(sum(without_reports[k].train_seconds for k in kinds))
    total_with = float(sum(with_reports[k].train_seconds for k in kinds))
    candidates = {
        "mean_relative_reduction": float(rel.mean()),
        "total_time_reduction": (
            1.0 - total_with / total_without if total_without > 0 else 0.0
        ),
        "mean_difference_seconds": float(time_d.mean()),
    }
    t_acc, p_acc = paired_t_test(acc_d)
    try:
        t_time, p_time = paired_t_test(time_d)
    except DegenerateStatisticsError:
        t_time, p_time = float("nan"), 1.0
    return ComparisonReport(
        kinds,
        dict(with_reports),
        dict(without_reports),
        acc_d,
        time_d,
        mean_accuracy_gain(
            [(with_reports[k].accuracy_test, without_reports[k].accuracy_test) for k in kinds]
        ),
        candidates["mean_relative_reduction"],
        t_acc,
        p_acc,
        t_time,
        p_time,
        candidates,
    )


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _accuracy_table_lines(c: ComparisonReport, include_times: bool):
    header = "kind,enriched,acc_train,acc_test"
    if include_times:
        header += ",train_seconds"
    csv = [header]
    md = ["| Algorithm | Mean Accuracy (train) | Mean Accuracy (test) |"
          + (" Mean train time (s) |" if include_times else ""),
          "| --- | --- | --- |" + (" --- |" if include_times else "")]
    for k in c.kinds:
        for enriched, rep in ((1, c.with_reports[k]), (0, c.without_reports[k])):
            row = f"{k.value},{enriched},{rep.accuracy_train:.4f},{rep.accuracy_test:.4f}"
            mdrow = (
                f"| {KIND_SHORT[k]}{' *' if enriched else ''} "
                f"| {rep.accuracy_train:.4f} | {rep.accuracy_test:.4f} |"
            )
            if include_times:
                row += f",{rep.train_seconds:.2f}"
                mdrow += f" {rep.train_seconds:.2f} |"
            csv.append(row)
            md.append(mdrow)
    md.append("")
    md.append("rows marked * use the cluster-label enrichment")
    return csv, md


def _detail_table_lines(c: ComparisonReport):
    csv = [
        "kind,enriched,recall_macro,recall_weighted,recall_abnormal,"
        "f1_macro,f1_weighted,f1_abnormal,fp,fn,fp_normal_positive,fn_normal_positive"
    ]
    md = ["| Algorithm | Recall | F1 | FP | FN |", "| --- | --- | --- | --- | --- |"]
    for k in c.kinds:
        for enriched, rep in ((1, c.with_reports[k]), (0, c.without_reports[k])):
            csv.append(
                f"{k.value},{enriched},{rep.recall_macro:.4f},{rep.recall_weighted:.4f},"
                f"{rep.recall_abnormal:.4f},{rep.f1_macro:.4f},{rep.f1_weighted:.4f},"
                f"{rep.f1_abnormal:.4f},{rep.fp},{rep.fn},"
                f"{rep.fp_normal_positive},{rep.fn_normal_positive}"
            )
            md.append(
                f"| {KIND_SHORT[k]}{' *' if enriched else ''} | {rep.recall_macro:.2f} "
                f"| {rep.f1_macro:.2f} | {rep.fp} | {rep.fn} |"
            )
    return csv, md


def timing_rows(c: ComparisonReport) -> list[str]:
    """Rows destined for the run's timings file."""
    rows = []
    for k in c.kinds:
        rows.append(
            f"train_seconds,{k.value},enriched,{c.with_reports[k].train_seconds:.6f}"
        )
        rows.append(
            f"train_seconds,{k.value},baseline,{c.without_reports[k].train_seconds:.6f}"
        )
    for name, v in c.time_stat_candidates.items():
        rows.append(f"time_stat,{name},,{v:.6f}")
    rows.append(f"time_stat,t_time,,{c.t_time:.6f}")
    rows.append(f"time_stat,p_time,,{c.p_time:.6f}")
    return rows


def emit_report(
    outdir,
    comparison: ComparisonReport,
    tune_result=None,
    assignments=None,
    include_time_artifacts: bool = False,
) -> list[str]:
    """Write the report tree (tables, figures, summary) and return the
    timing rows for the caller's timings file. Everything is built in
    memory first, so a validation failure writes nothing."""
    c = comparison
    files: dict[str, str] = {}
    acc_csv, acc_md = _accuracy_table_lines(c, include_time_artifacts)
    files["tables/accuracy_comparison.csv"] = "\n".join(acc_csv) + "\n"
    files["tables/accuracy_comparison.md"] = "\n".join(acc_md) + "\n"
    det_csv, det_md = _detail_table_lines(c)
    files["tables/detail_metrics.csv"] = "\n".join(det_csv) + "\n"
    files["tables/detail_metrics.md"] = "\n".join(det_md) + "\n"
    files["tables/improvement_stats.csv"] = (
        "statistic,value\n"
        f"mean_accuracy_gain,{c.mean_accuracy_gain:.6f}\n"
        f"t_accuracy,{c.t_accuracy:.6f}\n"
        f"p_accuracy,{c.p_accuracy:.6f}\n"
    )
    labels = [KIND_SHORT[k] for k in c.kinds]
    files["figures/accuracy_deltas.svg"] = svgplot.bar_chart(
        labels,
        c.accuracy_deltas,
        "Test-accuracy change from cluster-label enrichment",
        "accuracy delta",
    )
    if include_time_artifacts:
        files["figures/time_deltas.svg"] = svgplot.bar_chart(
            labels,
            c.time_deltas_seconds,
            "Training-time saving from cluster-label enrichment",
            "seconds saved",
        )
    if tune_result is not None:
        largest = max(tune_result.subsets, key=lambda s: s.n_rows)
        curve = largest.kdist_curve
        files["figures/kdistance.svg"] = svgplot.line_plot(
            [(np.arange(curve.shape[0]), curve, "sorted mean k-NN distance")],
            "k-distance curve (largest subset)",
            "points (sorted)",
            "distance",
        )
        if largest.silhouette_vs_epsilon:
            eps, sc = zip(*largest.silhouette_vs_epsilon)
            files["figures/silhouette_epsilon.svg"] = svgplot.line_plot(
                [(np.asarray(eps), np.asarray(sc), "")],
                "Silhouette score vs epsilon (DBSCAN)",
                "epsilon",
                "silhouette",
            )
        if largest.silhouette_vs_k:
            ks, sc = zip(*largest.silhouette_vs_k)
            files["figures/silhouette_k.svg"] = svgplot.line_plot(
                [(np.asarray(ks, dtype=float), np.asarray(sc), "")],
                "Silhouette score vs cluster count (k-means)",
                "clusters",
                "silhouette",
            )
    if assignments:
        rows = [
            (a.algorithm.value, svgplot.run_length_segments(a.labels))
            for a in assignments
        ]
        files["figures/cluster_timeline.svg"] = svgplot.timeline_strips(
            rows, "Cluster labels over time, by algorithm"
        )
    summary = [
        "classifier comparison: enriched (cluster-label features) vs baseline",
        f"kinds: {', '.join(k.value for k in c.kinds)}",
        f"mean test-accuracy gain: {c.mean_accuracy_gain:.6f}",
        f"paired t-test on accuracy: t={c.t_accuracy:.4f}, p={c.p_accuracy:.6f}",
        "training-time statistics are tracked separately in timings.csv",
    ]
    files["summary.txt"] = "\n".join(summary) + "\n"

    outdir = os.fspath(outdir)
    for rel in ("tables", "figures"):
        os.makedirs(os.path.join(outdir, rel), exist_ok=True)
    for rel, text in sorted(files.items()):
        atomic_write_text(os.path.join(outdir, rel), text)
    return timing_rows(c)
