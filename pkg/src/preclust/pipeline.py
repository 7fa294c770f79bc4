"""In-memory end-to-end orchestration of the five pipeline stages.

The CLI persists each stage's artifacts; this module holds the stage logic
itself so tests and the CLI share one implementation: data -> preprocess ->
tune -> cluster -> validate/select -> enrich -> paired classification ->
comparison.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .classify import (
    ClassifierConfig,
    ClassifierKind,
    CrossValResult,
    cross_validate,
    single_split_validate,
)
from .cluster import RunAllResult, run_all
from .clusterval import ValidationRow, validate_assignments
from .config import PipelineConfig
from .core import Algorithm, NocSchedule, RunSeed, SensorFrame
from .enrich import EnrichedFrame, augment
from .errors import ConfigError
from .ingest import SynthConfig, generate_synthetic, read_noc_csv, read_sensor_csv
from .preprocess import PreprocessResult, preprocess
from .report import ComparisonReport, build_comparison
from .tune import TuneResult, tune


def synth_config(cfg: PipelineConfig) -> SynthConfig:
    return SynthConfig(
        n_rows=cfg.n_rows,
        n_informative=cfg.n_informative,
        n_correlated=cfg.n_correlated,
        n_noise=cfg.n_noise,
        abnormal_windows=cfg.windows(),
        regime_shift=cfg.regime_shift,
        noise_sigma=cfg.noise_sigma,
        sampling_period_s=cfg.sampling_period_s,
    )


def load_data(cfg: PipelineConfig) -> tuple[SensorFrame, NocSchedule]:
    if cfg.source == "synth":
        return generate_synthetic(synth_config(cfg), RunSeed(cfg.seed))
    return read_sensor_csv(cfg.sensor_csv), read_noc_csv(cfg.noc_csv)


def classifier_config(cfg: PipelineConfig) -> ClassifierConfig:
    return ClassifierConfig(
        lr_c=cfg.lr_c,
        lr_tol=cfg.lr_tol,
        lr_max_iter=cfg.lr_max_iter,
        svc_c=cfg.svc_c,
        svc_tol=cfg.svc_tol,
        gnb_var_smoothing=cfg.gnb_var_smoothing,
        gbm_stages=cfg.gbm_stages,
        gbm_learning_rate=cfg.gbm_learning_rate,
        gbm_max_depth=cfg.gbm_max_depth,
        gbm_subsample=cfg.gbm_subsample,
        knn_k=cfg.knn_k,
        rf_trees=cfg.rf_trees,
        rf_min_samples_split=cfg.rf_min_samples_split,
    )


def run_tuning(cfg: PipelineConfig, frame: SensorFrame) -> TuneResult:
    result = tune(
        frame,
        RunSeed(cfg.seed),
        fractions=cfg.subset_fractions,
        kdist_k=cfg.kdist_k,
        eps_grid=cfg.eps_values(),
        k_grid=cfg.k_values(),
        min_pts=cfg.min_pts,
    )
    eps = cfg.epsilon_override if cfg.epsilon_override is not None else result.chosen_epsilon
    k = cfg.k_override if cfg.k_override is not None else result.chosen_k
    if eps != result.chosen_epsilon or k != result.chosen_k:
        result = TuneResult(result.subsets, float(eps), int(k), result.aggregation)
    return result


def cluster_overrides(cfg: PipelineConfig, n_rows: int) -> dict:
    mcs = (
        max(5, n_rows // 100)
        if cfg.hdbscan_min_cluster_size == "auto"
        else int(cfg.hdbscan_min_cluster_size)
    )
    return {
        "hdbscan_min_cluster_size": mcs,
        "hdbscan_min_samples": cfg.hdbscan_min_samples,
        "optics_min_pts": cfg.optics_min_pts,
        "optics_xi": cfg.optics_xi,
        "birch_branching_factor": cfg.birch_branching_factor,
        "birch_threshold": cfg.birch_threshold,
        "msams_k_bandwidth": cfg.msams_k_bandwidth,
    }


def run_clustering(cfg: PipelineConfig, frame: SensorFrame, tuned: TuneResult) -> RunAllResult:
    return run_all(
        frame,
        chosen_k=tuned.chosen_k,
        chosen_epsilon=tuned.chosen_epsilon,
        seed=RunSeed(cfg.seed),
        overrides=cluster_overrides(cfg, frame.n_rows),
    )


def select_algorithms(
    cfg: PipelineConfig, validation: list[ValidationRow]
) -> tuple[Algorithm, ...]:
    if cfg.selected_override.strip():
        chosen = []
        for name in cfg.selected_override.split(","):
            name = name.strip()
            try:
                chosen.append(Algorithm(name))
            except ValueError:
                raise ConfigError(f"unknown algorithm in selected_override: {name!r}") from None
        return tuple(chosen)
    return tuple(r.algorithm for r in validation if r.selected)


def _cv_task(payload):
    (kind_value, X, y, cfg_fields, seed, arm) = payload
    cfg = PipelineConfig(**cfg_fields)
    kind = ClassifierKind(kind_value)
    ccfg = classifier_config(cfg)
    if cfg.validation == "split":
        res = single_split_validate(
            kind, X, y, cfg.test_fraction, RunSeed(seed),
            smote_enabled=cfg.smote, smote_k=cfg.smote_k, config=ccfg,
        )
    else:
        res = cross_validate(
            kind, X, y, cfg.folds, RunSeed(seed),
            smote_enabled=cfg.smote, smote_k=cfg.smote_k, config=ccfg,
        )
    return kind_value, arm, res


def run_classification(
    cfg: PipelineConfig,
    X_base: np.ndarray,
    X_enriched: np.ndarray,
    y,
) -> tuple[dict[ClassifierKind, CrossValResult], dict[ClassifierKind, CrossValResult]]:
    """Both arms for every configured kind; returns (with, without)."""
    from dataclasses import asdict

    cfg_fields = asdict(cfg)
    tasks = []
    for kind in cfg.kinds:
        tasks.append((kind, X_enriched, y, cfg_fields, cfg.seed, "with"))
        tasks.append((kind, X_base, y, cfg_fields, cfg.seed, "without"))
    if cfg.jobs > 1 and not cfg.sequential_timing:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_cv_task, tasks))
    else:
        results = [_cv_task(t) for t in tasks]
    with_r: dict[ClassifierKind, CrossValResult] = {}
    without_r: dict[ClassifierKind, CrossValResult] = {}
    for kind_value, arm, res in results:
        (with_r if arm == "with" else without_r)[ClassifierKind(kind_value)] = res
    return with_r, without_r


@dataclass(frozen=True)
class PipelineResult:
    frame: SensorFrame
    schedule: NocSchedule
    prep: PreprocessResult
    tuned: TuneResult
    clusters: RunAllResult
    validation: list[ValidationRow]
    selected: tuple[Algorithm, ...]
    enriched: EnrichedFrame
    cv_with: dict[ClassifierKind, CrossValResult]
    cv_without: dict[ClassifierKind, CrossValResult]
    comparison: ComparisonReport


def run_pipeline(cfg: PipelineConfig, data=None) -> PipelineResult:
    frame, schedule = data if data is not None else load_data(cfg)
    prep = preprocess(frame, schedule, cfg.corr_threshold, cfg.anova_alpha)
    tuned = run_tuning(cfg, prep.frame)
    clusters = run_clustering(cfg, prep.frame, tuned)
    validation = validate_assignments(
        clusters.assignments, prep.frame, schedule, prep.labels, cfg.nmi_normalization
    )
    selected = select_algorithms(cfg, validation)
    by_algo = clusters.by_algorithm()
    selected_assignments = [by_algo[a] for a in selected if a in by_algo]
    enriched = augment(prep.frame, selected_assignments, one_hot=cfg.one_hot)
    cv_with, cv_without = run_classification(
        cfg, prep.frame.values, enriched.matrix, prep.labels
    )
    comparison = build_comparison(
        {k: r.mean for k, r in cv_with.items()},
        {k: r.mean for k, r in cv_without.items()},
    )
    return PipelineResult(
        frame,
        schedule,
        prep,
        tuned,
        clusters,
        validation,
        selected,
        enriched,
        cv_with,
        cv_without,
        comparison,
    )
