"""Declarative run configuration: an INI file with strict keys.

Every constant the pipeline depends on appears here as an explicit default
(correlation threshold 0.8, ANOVA alpha 0.05, subset fractions 10/20/30%,
five folds, SMOTE on, the six classifier kinds), so diffing a run against
the reference setup is a one-file affair. Unknown sections or keys are
errors, not warnings.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError


@dataclass(frozen=True)
class PipelineConfig:
    # [data]
    source: str = "synth"                  # synth | csv
    sensor_csv: str = ""
    noc_csv: str = ""
    # [synth]
    n_rows: int = 20_000
    n_informative: int = 6
    n_correlated: int = 4
    n_noise: int = 4
    regime_shift: float = 3.0
    noise_sigma: float = 0.5
    sampling_period_s: float = 60.0
    abnormal_windows: str = ""             # "start:end,start:end" row ranges
    # [preprocess]
    corr_threshold: float = 0.8
    anova_alpha: float = 0.05
    # [tune]
    subset_fractions: tuple[float, ...] = (0.10, 0.20, 0.30)
    kdist_k: int = 4
    min_pts: int = 4
    eps_grid: str = "0.1:2.0:0.1"
    k_grid: str = "2:12"
    epsilon_override: float | None = None
    k_override: int | None = None
    # [cluster]
    hdbscan_min_cluster_size: str = "auto"  # "auto" = max(5, n // 100)
    hdbscan_min_samples: int = 5
    optics_min_pts: int = 5
    optics_xi: float = 0.05
    birch_branching_factor: int = 50
    birch_threshold: float = 0.5
    msams_k_bandwidth: int = 50
    # [enrich]
    one_hot: bool = True
    smote: bool = True
    smote_k: int = 5
    selected_override: str = ""             # comma list of algorithm names
    # [classify]
    kinds: tuple[str, ...] = (
        "logistic_regression",
        "svc_rbf",
        "gaussian_nb",
        "gradient_boosting",
        "knn",
        "random_forest",
    )
    folds: int = 5
    test_fraction: float = 0.25
    validation: str = "cv"                  # cv | split
    lr_c: float = 1.0
    lr_tol: float = 1e-6
    lr_max_iter: int = 1000
    svc_c: float = 1.0
    svc_tol: float = 1e-3
    gnb_var_smoothing: float = 1e-9
    gbm_stages: int = 100
    gbm_learning_rate: float = 0.1
    gbm_max_depth: int = 3
    gbm_subsample: float = 1.0
    knn_k: int = 5
    rf_trees: int = 100
    rf_min_samples_split: int = 2
    # [report]
    timing_figures: bool = False
    nmi_normalization: str = "mean"
    # [run]
    seed: int = 0
    out: str = "runs/default"
    jobs: int = 1
    sequential_timing: bool = False

    def windows(self) -> tuple[tuple[int, int], ...] | None:
        if not self.abnormal_windows.strip():
            return None
        out = []
        for part in self.abnormal_windows.split(","):
            s, e = part.strip().split(":")
            out.append((int(s), int(e)))
        return tuple(out)

    def eps_values(self) -> tuple[float, ...]:
        lo, hi, step = (float(v) for v in self.eps_grid.split(":"))
        n = int(round((hi - lo) / step)) + 1
        return tuple(round(lo + i * step, 10) for i in range(n))

    def k_values(self) -> tuple[int, ...]:
        lo, hi = (int(v) for v in self.k_grid.split(":"))
        return tuple(range(lo, hi + 1))

    def config_hash(self) -> str:
        blob = ";".join(f"{f.name}={getattr(self, f.name)!r}" for f in fields(self))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_SCHEMA: dict[str, dict[str, str]] = {
    "data": {"source": "str", "sensor_csv": "str", "noc_csv": "str"},
    "synth": {
        "n_rows": "int",
        "n_informative": "int",
        "n_correlated": "int",
        "n_noise": "int",
        "regime_shift": "float",
        "noise_sigma": "float",
        "sampling_period_s": "float",
        "abnormal_windows": "str",
    },
    "preprocess": {"corr_threshold": "float", "anova_alpha": "float"},
    "tune": {
        "subset_fractions": "floats",
        "kdist_k": "int",
        "min_pts": "int",
        "eps_grid": "str",
        "k_grid": "str",
        "epsilon_override": "optfloat",
        "k_override": "optint",
    },
    "cluster": {
        "hdbscan_min_cluster_size": "str",
        "hdbscan_min_samples": "int",
        "optics_min_pts": "int",
        "optics_xi": "float",
        "birch_branching_factor": "int",
        "birch_threshold": "float",
        "msams_k_bandwidth": "int",
    },
    "enrich": {
        "one_hot": "bool",
        "smote": "bool",
        "smote_k": "int",
        "selected_override": "str",
    },
    "classify": {
        "kinds": "strs",
        "folds": "int",
        "test_fraction": "float",
        "validation": "str",
        "lr_c": "float",
        "lr_tol": "float",
        "lr_max_iter": "int",
        "svc_c": "float",
        "svc_tol": "float",
        "gnb_var_smoothing": "float",
        "gbm_stages": "int",
        "gbm_learning_rate": "float",
        "gbm_max_depth": "int",
        "gbm_subsample": "float",
        "knn_k": "int",
        "rf_trees": "int",
        "rf_min_samples_split": "int",
    },
    "report": {"timing_figures": "bool", "nmi_normalization": "str"},
    "run": {"seed": "int", "out": "str", "jobs": "int", "sequential_timing": "bool"},
}


def _convert(raw: str, typ: str, where: str):
    raw = raw.strip()
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        if typ == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if typ == "strs":
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if typ == "optfloat":
            return float(raw) if raw else None
        if typ == "optint":
            return int(raw) if raw else None
        return raw
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {typ}") from exc


def load_config(path) -> PipelineConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, object] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key [{section}] {key}")
            values[key] = _convert(raw, _SCHEMA[section][key], f"[{section}] {key}")
    cfg = replace(PipelineConfig(), **values)
    validate_config(cfg)
    return cfg


def validate_config(cfg: PipelineConfig) -> None:
    if cfg.source not in ("synth", "csv"):
        raise ConfigError(f"data source must be synth or csv, got {cfg.source!r}")
    if cfg.source == "csv" and (not cfg.sensor_csv or not cfg.noc_csv):
        raise ConfigError("csv source needs sensor_csv and noc_csv paths")
    if not 0.0 < cfg.corr_threshold <= 1.0:
        raise ConfigError("corr_threshold must lie in (0, 1]")
    if not 0.0 < cfg.anova_alpha < 1.0:
        raise ConfigError("anova_alpha must lie in (0, 1)")
    if cfg.validation not in ("cv", "split"):
        raise ConfigError("validation must be cv or split")
    if cfg.folds < 2:
        raise ConfigError("folds must be >= 2")
    if not 0.0 < cfg.test_fraction < 1.0:
        raise ConfigError("test_fraction must lie in (0, 1)")
    if cfg.hdbscan_min_cluster_size != "auto":
        try:
            int(cfg.hdbscan_min_cluster_size)
        except ValueError:
            raise ConfigError("hdbscan_min_cluster_size must be 'auto' or an integer") from None
    from .classify import ClassifierKind

    for k in cfg.kinds:
        try:
            ClassifierKind(k)
        except ValueError:
            raise ConfigError(f"unknown classifier kind {k!r}") from None
    if cfg.nmi_normalization not in ("mean", "min", "max", "geometric"):
        raise ConfigError("nmi_normalization must be one of mean/min/max/geometric")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be >= 1")
    try:
        cfg.eps_values()
        cfg.k_values()
        cfg.windows()
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad grid or window syntax: {exc}") from exc


def dump_default_config() -> str:
    """The full default configuration as INI text."""
    cfg = PipelineConfig()
    lines = []
    for section, keys in _SCHEMA.items():
        lines.append(f"[{section}]")
        for key in keys:
            v = getattr(cfg, key)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            elif v is None:
                v = ""
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{key} = {v}")
        lines.append("")
    return "\n".join(lines)
