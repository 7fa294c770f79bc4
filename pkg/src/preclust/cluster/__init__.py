"""The clustering algorithm suite and the batch runner."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import Algorithm, ClusterAssignment, RunSeed
from .birch import ClusteringFeature, birch
from .common import as_matrix, knn_mean_distance, kth_nearest_distance
from .density import OpticsResult, dbscan, extract_eps_cut, optics
from .gmm import GmmModel, gmm_em
from .hierarchy import CondensedTree, hdbscan
from .kmeans import KMeansModel, kmeans
from .meanshift import flat_mean_shift_step, mean_shift_adaptive

__all__ = [
    "Algorithm",
    "ClusterAssignment",
    "ClusteringFeature",
    "CondensedTree",
    "GmmModel",
    "KMeansModel",
    "OpticsResult",
    "RunAllResult",
    "birch",
    "dbscan",
    "extract_eps_cut",
    "gmm_em",
    "hdbscan",
    "kmeans",
    "knn_mean_distance",
    "kth_nearest_distance",
    "mean_shift_adaptive",
    "optics",
    "run_all",
    "flat_mean_shift_step",
]


def default_cluster_params(n_rows: int) -> dict:
    return {
        "hdbscan_min_cluster_size": max(5, n_rows // 100),
        "hdbscan_min_samples": 5,
        "optics_min_pts": 5,
        "optics_xi": 0.05,
        "birch_branching_factor": 50,
        "birch_threshold": 0.5,
        "msams_k_bandwidth": 50,
    }


@dataclass(frozen=True)
class RunAllResult:
    assignments: tuple[ClusterAssignment, ...]
    params: dict          # the tuned values every algorithm was handed
    failures: dict = field(default_factory=dict)

    def by_algorithm(self) -> dict[Algorithm, ClusterAssignment]:
        return {a.algorithm: a for a in self.assignments}


def run_all(
    X,
    chosen_k: int,
    chosen_epsilon: float,
    seed: RunSeed,
    overrides: dict | None = None,
) -> RunAllResult:
    """Run the six clustering algorithms with the tuned parameters.

    k feeds the centroid/model-based algorithms (k-means, GMM, BIRCH's
    global step); epsilon is recorded alongside for the density algorithms,
    whose own granularity parameters are config-exposed. A failing
    algorithm is recorded and skipped, never fatal.
    """
    X = as_matrix(X)
    n = X.shape[0]
    p = default_cluster_params(n)
    if overrides:
        unknown = set(overrides) - set(p)
        if unknown:
            raise ValueError(f"unknown cluster parameter overrides: {sorted(unknown)}")
        p.update(overrides)

    jobs = [
        (Algorithm.KMEANS, lambda: kmeans(X, chosen_k, seed)[1]),
        (
            Algorithm.HDBSCAN,
            lambda: hdbscan(
                X,
                min_cluster_size=int(p["hdbscan_min_cluster_size"]),
                min_samples=int(p["hdbscan_min_samples"]),
            )[1],
        ),
        (
            Algorithm.OPTICS,
            lambda: optics(
                X, min_pts=int(p["optics_min_pts"]), xi=float(p["optics_xi"])
            ).assignment,
        ),
        (
            Algorithm.BIRCH,
            lambda: birch(
                X,
                k_global=chosen_k,
                seed=seed,
                branching_factor=int(p["birch_branching_factor"]),
                threshold=float(p["birch_threshold"]),
            ),
        ),
        (Algorithm.GMM, lambda: gmm_em(X, chosen_k, seed)[1]),
        (
            Algorithm.MSAMS,
            lambda: mean_shift_adaptive(
                X, k_bandwidth=min(int(p["msams_k_bandwidth"]), n - 1), seed=seed
            ),
        ),
    ]
    assignments = []
    failures = {}
    for algo, fit in jobs:
        try:
            assignments.append(fit())
        except Exception as exc:  # noqa: BLE001 - per-algorithm isolation is the contract
            failures[algo.value] = f"{type(exc).__name__}: {exc}"
    params = {"k": float(chosen_k), "epsilon": float(chosen_epsilon), **p}
    return RunAllResult(tuple(assignments), params, failures)
