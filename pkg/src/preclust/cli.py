"""Command-line pipeline: composable stages plus a one-shot run-all.

Stages persist their outputs under the run directory and later stages
consume them, so `preclust preprocess && preclust tune && ...` equals
`preclust run-all`. Wall-clock measurements are appended to timings.csv
only; every other artifact is a pure function of (inputs, config, seed),
which makes reruns byte-comparable by excluding that single file.

Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import __version__
from .classify import ClassificationReport, ClassifierKind, report_csv_row, REPORT_CSV_HEADER
from .cluster import RunAllResult
from .clusterval import (
    validate_assignments,
    validation_table_csv,
    validation_table_markdown,
)
from .config import PipelineConfig, dump_default_config, load_config, validate_config
from .core import Algorithm, ClusterAssignment, LabelVector
from .enrich import augment
from .errors import ConfigError, MissingInputError, PreclustError
from .ingest import atomic_write_text, read_noc_csv, read_sensor_csv, write_noc_csv, write_sensor_csv
from .pipeline import (
    load_data,
    run_classification,
    run_clustering,
    run_pipeline,
    run_tuning,
    select_algorithms,
)
from .preprocess import preprocess
from .report import build_comparison, emit_report
from .tune import SubsetTuning, TuneResult
from . import svgplot


# ---------------------------------------------------------------------------
# artifact helpers
# ---------------------------------------------------------------------------


def _p(cfg: PipelineConfig, *parts) -> str:
    return os.path.join(cfg.out, *parts)


def _require(path: str, needed_by: str, produced_by: str) -> str:
    if not os.path.exists(path):
        raise MissingInputError(
            f"{needed_by}: missing input {path} (run `preclust {produced_by}` first)"
        )
    return path


def _append_timings(cfg: PipelineConfig, rows: list[str]) -> None:
    path = _p(cfg, "timings.csv")
    new = not os.path.exists(path)
    with open(path, "a", encoding="utf-8") as fh:
        if new:
            fh.write("record,item,detail,seconds\n")
        for row in rows:
            fh.write(row + "\n")


def _read_timing_means(cfg: PipelineConfig) -> dict[tuple[str, str], float]:
    path = _p(cfg, "timings.csv")
    out: dict[tuple[str, str], float] = {}
    if not os.path.exists(path):
        return out
    with open(path, encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if len(row) == 4 and row[0] == "train" and row[2].endswith("_mean"):
                out[(row[1], row[2][: -len("_mean")])] = float(row[3])
    return out


def _write_labels(cfg: PipelineConfig, frame, labels) -> None:
    lines = ["row_index,timestamp,label"]
    lab = np.asarray(labels)
    for i in range(frame.n_rows):
        lines.append(f"{i},{int(frame.timestamps[i])},{int(lab[i])}")
    atomic_write_text(_p(cfg, "prep", "labels.csv"), "\n".join(lines) + "\n")


def _read_labels(cfg: PipelineConfig) -> LabelVector:
    path = _require(_p(cfg, "prep", "labels.csv"), "labels", "preprocess")
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return LabelVector(np.array([int(r[2]) for r in rows[1:]], dtype=np.int64))


def _write_assignments(cfg: PipelineConfig, result: RunAllResult) -> None:
    lines = ["row_index,algorithm,label"]
    for a in result.assignments:
        tag = a.algorithm.value
        for i, lab in enumerate(a.labels):
            lines.append(f"{i},{tag},{int(lab)}")
    atomic_write_text(_p(cfg, "cluster", "assignments.csv"), "\n".join(lines) + "\n")
    params = ["algorithm,param,value"]
    params.append(f"tuned,k,{result.params['k']:g}")
    params.append(f"tuned,epsilon,{result.params['epsilon']:g}")
    for a in result.assignments:
        for key in sorted(a.params):
            params.append(f"{a.algorithm.value},{key},{a.params[key]:g}")
    atomic_write_text(_p(cfg, "cluster", "params.csv"), "\n".join(params) + "\n")
    if result.failures:
        lines = [f"{algo}: {msg}" for algo, msg in sorted(result.failures.items())]
        atomic_write_text(_p(cfg, "cluster", "failures.txt"), "\n".join(lines) + "\n")
    _append_timings(
        cfg,
        [f"cluster,{a.algorithm.value},,{a.fit_seconds:.6f}" for a in result.assignments],
    )


def _read_assignments(cfg: PipelineConfig) -> list[ClusterAssignment]:
    path = _require(_p(cfg, "cluster", "assignments.csv"), "assignments", "cluster")
    per_algo: dict[str, list[int]] = {}
    order: list[str] = []
    with open(path, encoding="utf-8") as fh:
        rows = csv.reader(fh)
        next(rows)
        for r in rows:
            tag = r[1]
            if tag not in per_algo:
                per_algo[tag] = []
                order.append(tag)
            per_algo[tag].append(int(r[2]))
    return [
        ClusterAssignment(Algorithm(tag), np.array(per_algo[tag], dtype=np.int64))
        for tag in order
    ]


def _write_chosen(cfg: PipelineConfig, tuned: TuneResult) -> None:
    text = (
        f"epsilon = {tuned.chosen_epsilon:.10g}\n"
        f"k = {tuned.chosen_k}\n"
        f"aggregation = {tuned.aggregation}\n"
    )
    atomic_write_text(_p(cfg, "tune", "chosen.txt"), text)


def _read_chosen(cfg: PipelineConfig) -> tuple[float, int]:
    path = _require(_p(cfg, "tune", "chosen.txt"), "tuned parameters", "tune")
    eps = k = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, _, value = line.partition("=")
            key = key.strip()
            if key == "epsilon":
                eps = float(value)
            elif key == "k":
                k = int(value)
    if eps is None or k is None:
        raise MissingInputError(f"{path}: missing epsilon or k")
    return eps, k


_MEAN_HEADER = (
    "kind,enriched,acc_train,acc_test,recall_macro,recall_weighted,f1_macro,"
    "f1_weighted,recall_abnormal,f1_abnormal,recall_normal,f1_normal,"
    "fp,fn,c00,c01,c10,c11"
)


def _mean_row(kind: ClassifierKind, enriched: bool, r: ClassificationReport) -> str:
    c = r.confusion
    return ",".join(
        [
            kind.value,
            str(int(enriched)),
            "%.6f" % r.accuracy_train,
            "%.6f" % r.accuracy_test,
            "%.6f" % r.recall_macro,
            "%.6f" % r.recall_weighted,
            "%.6f" % r.f1_macro,
            "%.6f" % r.f1_weighted,
            "%.6f" % r.recall_abnormal,
            "%.6f" % r.f1_abnormal,
            "%.6f" % r.recall_normal,
            "%.6f" % r.f1_normal,
            str(r.fp),
            str(r.fn),
            str(c[0][0]),
            str(c[0][1]),
            str(c[1][0]),
            str(c[1][1]),
        ]
    )


def _write_train_outputs(cfg: PipelineConfig, cv_with, cv_without) -> None:
    mean_lines = [_MEAN_HEADER]
    fold_lines = [REPORT_CSV_HEADER.rsplit(",", 1)[0]]   # sans train_seconds
    timing = []
    for arm, results in (("enriched", cv_with), ("baseline", cv_without)):
        enriched = arm == "enriched"
        for kind in cv_with:
            res = results[kind]
            mean_lines.append(_mean_row(kind, enriched, res.mean))
            timing.append(f"train,{kind.value},{arm}_mean,{res.mean.train_seconds:.6f}")
            for f, rep in enumerate(res.folds):
                fold_lines.append(report_csv_row(kind.value, enriched, f, rep, include_times=False))
                timing.append(f"train,{kind.value},{arm}_fold{f},{rep.train_seconds:.6f}")
    atomic_write_text(_p(cfg, "train", "mean_reports.csv"), "\n".join(mean_lines) + "\n")
    atomic_write_text(_p(cfg, "train", "fold_reports.csv"), "\n".join(fold_lines) + "\n")
    _append_timings(cfg, timing)


def _read_mean_reports(cfg: PipelineConfig):
    path = _require(_p(cfg, "train", "mean_reports.csv"), "classifier reports", "train")
    times = _read_timing_means(cfg)
    withs: dict[ClassifierKind, ClassificationReport] = {}
    withouts: dict[ClassifierKind, ClassificationReport] = {}
    with open(path, encoding="utf-8") as fh:
        rows = csv.reader(fh)
        next(rows)
        for r in rows:
            kind = ClassifierKind(r[0])
            enriched = r[1] == "1"
            arm = "enriched" if enriched else "baseline"
            rep = ClassificationReport(
                accuracy_train=float(r[2]),
                accuracy_test=float(r[3]),
                recall_macro=float(r[4]),
                recall_weighted=float(r[5]),
                f1_macro=float(r[6]),
                f1_weighted=float(r[7]),
                recall_abnormal=float(r[8]),
                f1_abnormal=float(r[9]),
                recall_normal=float(r[10]),
                f1_normal=float(r[11]),
                fp=int(r[12]),
                fn=int(r[13]),
                confusion=((int(r[14]), int(r[15])), (int(r[16]), int(r[17]))),
                train_seconds=times.get((kind.value, arm), 0.0),
            )
            (withs if enriched else withouts)[kind] = rep
    return withs, withouts


def _ensure_dirs(cfg: PipelineConfig, *names) -> None:
    for name in names:
        os.makedirs(_p(cfg, name), exist_ok=True)


def _snapshot_config(cfg: PipelineConfig) -> None:
    from dataclasses import fields

    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        lines.append(f"{f.name} = {v}")
    atomic_write_text(_p(cfg, "config_resolved.txt"), "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# stage commands
# ---------------------------------------------------------------------------


def cmd_synth(cfg: PipelineConfig) -> None:
    if cfg.source != "synth":
        raise ConfigError("synth stage requires data source = synth")
    _ensure_dirs(cfg, "data")
    _snapshot_config(cfg)
    frame, schedule = load_data(cfg)
    write_sensor_csv(frame, _p(cfg, "data", "sensor.csv"))
    write_noc_csv(schedule, _p(cfg, "data", "noc.csv"))
    print(f"synth: {frame.n_rows} rows x {frame.n_features} channels -> {_p(cfg, 'data')}")


def _load_stage_data(cfg: PipelineConfig):
    if cfg.source == "synth":
        sensor = _require(_p(cfg, "data", "sensor.csv"), "preprocess", "synth")
        noc = _require(_p(cfg, "data", "noc.csv"), "preprocess", "synth")
        return read_sensor_csv(sensor), read_noc_csv(noc)
    return read_sensor_csv(cfg.sensor_csv), read_noc_csv(cfg.noc_csv)


def cmd_preprocess(cfg: PipelineConfig) -> None:
    _ensure_dirs(cfg, "prep")
    _snapshot_config(cfg)
    frame, schedule = _load_stage_data(cfg)
    prep = preprocess(frame, schedule, cfg.corr_threshold, cfg.anova_alpha)
    write_sensor_csv(prep.frame, _p(cfg, "prep", "features.csv"))
    _write_labels(cfg, prep.frame, prep.labels)
    prep.report.to_csv(_p(cfg, "prep", "feature_report.csv"))
    prep.standardizer.to_csv(_p(cfg, "prep", "standardizer.csv"))
    kept = len(prep.frame.feature_names)
    print(f"preprocess: kept {kept}/{frame.n_features} features over {prep.frame.n_rows} rows")


def _read_features(cfg: PipelineConfig, needed_by: str):
    return read_sensor_csv(_require(_p(cfg, "prep", "features.csv"), needed_by, "preprocess"))


def cmd_tune(cfg: PipelineConfig, plots: bool = False) -> None:
    _ensure_dirs(cfg, "tune")
    frame = _read_features(cfg, "tune")
    tuned = run_tuning(cfg, frame)
    for sub in tuned.subsets:
        pct = f"p{int(round(sub.fraction * 100)):03d}"
        curve_lines = ["rank,distance"] + [
            f"{i},{'%.17g' % v}" for i, v in enumerate(sub.kdist_curve)
        ]
        atomic_write_text(_p(cfg, "tune", f"kdist_{pct}.csv"), "\n".join(curve_lines) + "\n")
        eps_lines = ["epsilon,silhouette"] + [
            f"{'%.10g' % e},{'%.10g' % s}" for e, s in sub.silhouette_vs_epsilon
        ]
        atomic_write_text(
            _p(cfg, "tune", f"silhouette_epsilon_{pct}.csv"), "\n".join(eps_lines) + "\n"
        )
        k_lines = ["k,silhouette"] + [
            f"{k},{'%.10g' % s}" for k, s in sub.silhouette_vs_k
        ]
        atomic_write_text(_p(cfg, "tune", f"silhouette_k_{pct}.csv"), "\n".join(k_lines) + "\n")
    _write_chosen(cfg, tuned)
    if plots:
        _ensure_dirs(cfg, os.path.join("tune", "figures"))
        largest = max(tuned.subsets, key=lambda s: s.n_rows)
        atomic_write_text(
            _p(cfg, "tune", "figures", "kdistance.svg"),
            svgplot.line_plot(
                [(np.arange(largest.kdist_curve.shape[0]), largest.kdist_curve, "")],
                "k-distance curve",
                "points (sorted)",
                "distance",
            ),
        )
        if largest.silhouette_vs_epsilon:
            eps, sc = zip(*largest.silhouette_vs_epsilon)
            atomic_write_text(
                _p(cfg, "tune", "figures", "silhouette_epsilon.svg"),
                svgplot.line_plot(
                    [(np.asarray(eps), np.asarray(sc), "")],
                    "Silhouette vs epsilon (DBSCAN)",
                    "epsilon",
                    "silhouette",
                ),
            )
        if largest.silhouette_vs_k:
            ks, sc = zip(*largest.silhouette_vs_k)
            atomic_write_text(
                _p(cfg, "tune", "figures", "silhouette_k.svg"),
                svgplot.line_plot(
                    [(np.asarray(ks, dtype=float), np.asarray(sc), "")],
                    "Silhouette vs k (k-means)",
                    "clusters",
                    "silhouette",
                ),
            )
    print(f"tune: chosen epsilon={tuned.chosen_epsilon:g}, k={tuned.chosen_k}")


def cmd_cluster(cfg: PipelineConfig) -> None:
    _ensure_dirs(cfg, "cluster")
    frame = _read_features(cfg, "cluster")
    eps, k = _read_chosen(cfg)
    tuned = TuneResult((), eps, k)
    result = run_clustering(cfg, frame, tuned)
    _write_assignments(cfg, result)
    counts = {a.algorithm.value: a.n_clusters for a in result.assignments}
    print(f"cluster: k={k}, epsilon={eps:g}; clusters per algorithm: {counts}")
    if result.failures:
        print(f"cluster: skipped algorithms: {sorted(result.failures)}", file=sys.stderr)


def cmd_validate(cfg: PipelineConfig) -> None:
    _ensure_dirs(cfg, "validate")
    frame = _read_features(cfg, "validate")
    labels = _read_labels(cfg)
    _, schedule = _load_stage_data(cfg)
    assignments = _read_assignments(cfg)
    rows = validate_assignments(assignments, frame, schedule, labels, cfg.nmi_normalization)
    validation_table_csv(rows, _p(cfg, "validate", "validation.csv"))
    validation_table_markdown(rows, _p(cfg, "validate", "validation.md"))
    selected = select_algorithms(cfg, rows)
    atomic_write_text(
        _p(cfg, "validate", "selected.txt"),
        "\n".join(a.value for a in selected) + "\n",
    )
    best = max(rows, key=lambda r: r.ari)
    print(
        f"validate: best ARI {best.ari:.3f} ({best.algorithm.value}); "
        f"selected {[a.value for a in selected]}"
    )


def _read_selected(cfg: PipelineConfig) -> list[Algorithm]:
    path = _require(_p(cfg, "validate", "selected.txt"), "train", "validate")
    with open(path, encoding="utf-8") as fh:
        return [Algorithm(line.strip()) for line in fh if line.strip()]


def cmd_train(cfg: PipelineConfig) -> None:
    _ensure_dirs(cfg, "train")
    frame = _read_features(cfg, "train")
    labels = _read_labels(cfg)
    assignments = {a.algorithm: a for a in _read_assignments(cfg)}
    selected = _read_selected(cfg)
    chosen = [assignments[a] for a in selected if a in assignments]
    enriched = augment(frame, chosen, one_hot=cfg.one_hot)
    cv_with, cv_without = run_classification(cfg, frame.values, enriched.matrix, labels)
    _write_train_outputs(cfg, cv_with, cv_without)
    mean_gain = float(
        np.mean(
            [
                cv_with[k].mean.accuracy_test - cv_without[k].mean.accuracy_test
                for k in cv_with
            ]
        )
    )
    print(f"train: {len(cv_with)} kinds x 2 arms; mean test-accuracy gain {mean_gain:+.4f}")


def cmd_compare(cfg: PipelineConfig) -> None:
    _ensure_dirs(cfg, "report")
    withs, withouts = _read_mean_reports(cfg)
    comparison = build_comparison(withs, withouts)
    tuned = _try_load_tune(cfg)
    assignments = None
    if os.path.exists(_p(cfg, "cluster", "assignments.csv")):
        assignments = _read_assignments(cfg)
    timing_rows = emit_report(
        _p(cfg, "report"),
        comparison,
        tune_result=tuned,
        assignments=assignments,
        include_time_artifacts=cfg.timing_figures,
    )
    _append_timings(cfg, [f"report,{r}" for r in timing_rows])
    _write_run_summary(cfg, comparison)
    print(
        f"compare: mean accuracy gain {comparison.mean_accuracy_gain:+.4f} "
        f"(p={comparison.p_accuracy:.4f}); time stats in timings.csv"
    )


def _try_load_tune(cfg: PipelineConfig) -> TuneResult | None:
    path = _p(cfg, "tune", "chosen.txt")
    if not os.path.exists(path):
        return None
    eps, k = _read_chosen(cfg)
    subsets = []
    for name in sorted(os.listdir(_p(cfg, "tune"))):
        if not name.startswith("kdist_"):
            continue
        pct = name[len("kdist_") : -len(".csv")]
        with open(_p(cfg, "tune", name), encoding="utf-8") as fh:
            rows = list(csv.reader(fh))[1:]
        curve = np.array([float(r[1]) for r in rows])
        sil_eps = []
        eps_path = _p(cfg, "tune", f"silhouette_epsilon_{pct}.csv")
        if os.path.exists(eps_path):
            with open(eps_path, encoding="utf-8") as fh:
                sil_eps = [(float(r[0]), float(r[1])) for r in list(csv.reader(fh))[1:]]
        sil_k = []
        k_path = _p(cfg, "tune", f"silhouette_k_{pct}.csv")
        if os.path.exists(k_path):
            with open(k_path, encoding="utf-8") as fh:
                sil_k = [(int(r[0]), float(r[1])) for r in list(csv.reader(fh))[1:]]
        subsets.append(
            SubsetTuning(
                float(pct[1:]) / 100.0,
                curve.shape[0],
                curve,
                -1,
                float("nan"),
                tuple(sil_eps),
                tuple(sil_k),
            )
        )
    return TuneResult(tuple(subsets), eps, k)


def _write_run_summary(cfg: PipelineConfig, comparison) -> None:
    import platform

    lines = [
        f"preclust {__version__}",
        f"python {platform.python_version()}, numpy {np.__version__}",
        f"seed: {cfg.seed}",
        f"config hash: {cfg.config_hash()}",
        f"mean test-accuracy gain: {comparison.mean_accuracy_gain:.6f}",
        f"paired t-test: t={comparison.t_accuracy:.4f}, p={comparison.p_accuracy:.6f}",
    ]
    atomic_write_text(_p(cfg, "report", "run_summary.txt"), "\n".join(lines) + "\n")


def cmd_run_all(cfg: PipelineConfig) -> None:
    _ensure_dirs(cfg, "data", "prep", "tune", "cluster", "validate", "train", "report")
    _snapshot_config(cfg)
    if cfg.source == "synth":
        frame, schedule = load_data(cfg)
        write_sensor_csv(frame, _p(cfg, "data", "sensor.csv"))
        write_noc_csv(schedule, _p(cfg, "data", "noc.csv"))
    else:
        frame, schedule = _load_stage_data(cfg)
    result = run_pipeline(cfg, data=(frame, schedule))
    write_sensor_csv(result.prep.frame, _p(cfg, "prep", "features.csv"))
    _write_labels(cfg, result.prep.frame, result.prep.labels)
    result.prep.report.to_csv(_p(cfg, "prep", "feature_report.csv"))
    result.prep.standardizer.to_csv(_p(cfg, "prep", "standardizer.csv"))
    tuned = result.tuned
    for sub in tuned.subsets:
        pct = f"p{int(round(sub.fraction * 100)):03d}"
        atomic_write_text(
            _p(cfg, "tune", f"kdist_{pct}.csv"),
            "\n".join(
                ["rank,distance"]
                + [f"{i},{'%.17g' % v}" for i, v in enumerate(sub.kdist_curve)]
            )
            + "\n",
        )
        atomic_write_text(
            _p(cfg, "tune", f"silhouette_epsilon_{pct}.csv"),
            "\n".join(
                ["epsilon,silhouette"]
                + [f"{'%.10g' % e},{'%.10g' % s}" for e, s in sub.silhouette_vs_epsilon]
            )
            + "\n",
        )
        atomic_write_text(
            _p(cfg, "tune", f"silhouette_k_{pct}.csv"),
            "\n".join(
                ["k,silhouette"] + [f"{k},{'%.10g' % s}" for k, s in sub.silhouette_vs_k]
            )
            + "\n",
        )
    _write_chosen(cfg, tuned)
    _write_assignments(cfg, result.clusters)
    validation_table_csv(result.validation, _p(cfg, "validate", "validation.csv"))
    validation_table_markdown(result.validation, _p(cfg, "validate", "validation.md"))
    atomic_write_text(
        _p(cfg, "validate", "selected.txt"),
        "\n".join(a.value for a in result.selected) + "\n",
    )
    _write_train_outputs(cfg, result.cv_with, result.cv_without)
    timing_rows = emit_report(
        _p(cfg, "report"),
        result.comparison,
        tune_result=result.tuned,
        assignments=result.clusters.assignments,
        include_time_artifacts=cfg.timing_figures,
    )
    _append_timings(cfg, [f"report,{r}" for r in timing_rows])
    _write_run_summary(cfg, result.comparison)
    print(
        f"run-all: gain {result.comparison.mean_accuracy_gain:+.4f} "
        f"(p={result.comparison.p_accuracy:.4f}) -> {cfg.out}"
    )


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="preclust",
        description="cluster-label enrichment pipeline for sensor fault classification",
    )
    parser.add_argument("--config", help="INI run configuration", default=None)
    parser.add_argument("--seed", type=int, default=None, help="override run seed")
    parser.add_argument("--out", default=None, help="override output directory")
    parser.add_argument("--jobs", type=int, default=None, help="worker cap (default 1)")
    parser.add_argument(
        "--sequential-timing",
        action="store_true",
        help="force serial classifier fits for comparable wall-clock numbers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", help="generate the synthetic dataset")
    sub.add_parser("preprocess", help="clean, select, standardize, label")
    p_tune = sub.add_parser("tune", help="estimate epsilon and k")
    p_tune.add_argument("--plots", action="store_true", help="emit tuning SVG plots")
    sub.add_parser("cluster", help="run the six clustering algorithms")
    sub.add_parser("validate", help="score clusterings against the NoC periods")
    sub.add_parser("train", help="cross-validate classifiers with and without enrichment")
    sub.add_parser("compare", help="emit comparison tables and figures")
    sub.add_parser("run-all", aliases=["run_all"], help="run every stage in order")
    sub.add_parser("default-config", help="print the default configuration")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "default-config":
            print(dump_default_config(), end="")
            return 0
        if args.config:
            cfg = load_config(args.config)
        else:
            cfg = PipelineConfig()
        from dataclasses import replace

        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["out"] = args.out
        if args.jobs is not None:
            overrides["jobs"] = args.jobs
        if args.sequential_timing:
            overrides["sequential_timing"] = True
        if overrides:
            cfg = replace(cfg, **overrides)
        validate_config(cfg)
        os.makedirs(cfg.out, exist_ok=True)
        if args.command == "synth":
            cmd_synth(cfg)
        elif args.command == "preprocess":
            cmd_preprocess(cfg)
        elif args.command == "tune":
            cmd_tune(cfg, plots=args.plots)
        elif args.command == "cluster":
            cmd_cluster(cfg)
        elif args.command == "validate":
            cmd_validate(cfg)
        elif args.command == "train":
            cmd_train(cfg)
        elif args.command == "compare":
            cmd_compare(cfg)
        else:
            cmd_run_all(cfg)
        return 0
    except PreclustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        print(f"unexpected error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
