"""Acceptance criteria, one test per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line
per criterion. Criteria 9-11 execute full-size pipelines and take tens of
minutes combined; everything else is quick.
"""

import os
import subprocess
import sys
import time

import numpy as np
import pytest

from preclust.classify import ClassifierKind
from preclust.cluster import birch, dbscan, extract_eps_cut, kmeans, optics
from preclust.cluster._kernels import prim_mutual_reachability_mst
from preclust.cluster.common import kth_nearest_distance
from preclust.clusterval import (
    adjusted_rand_index,
    normalized_mutual_information,
    select_top,
)
from preclust.config import PipelineConfig
from preclust.core import Algorithm, LabelVector, RunSeed, SensorFrame
from preclust.enrich import smote
from preclust.pipeline import run_pipeline
from preclust.preprocess import anova_select, prune_correlated
from preclust.report import mean_accuracy_gain, paired_t_test
from preclust.tune import argmax_sweep, detect_knee, kdistance_curve, silhouette_score, sweep_k

from oracles import (
    ari_bruteforce,
    dbscan_bruteforce,
    mst_weight_kruskal,
    nmi_bruteforce,
    partitions_equal,
    pearson_r,
    silhouette_bruteforce,
)

TABLE2_TEST_ACC = {
    "with": (0.9786, 0.8037, 0.9924, 0.9281, 0.9819, 0.9601),
    "without": (0.9234, 0.7877, 0.9344, 0.9240, 0.8585, 0.9242),
}
TABLE2_TIMES = {
    "with": (112.28, 1.28, 0.14, 96.20, 1.17, 32.69),
    "without": (732.22, 0.74, 0.11, 138.25, 0.86, 57.80),
}
TABLE1 = {
    Algorithm.KMEANS: (0.30, 0.42),
    Algorithm.HDBSCAN: (0.55, 0.64),
    Algorithm.OPTICS: (-0.02, 0.16),
    Algorithm.BIRCH: (0.03, 0.25),
    Algorithm.GMM: (0.45, 0.56),
    Algorithm.MSAMS: (0.35, 0.36),
}


def _report(cid: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    print(f"\n[ACCEPTANCE] criterion {cid}: {status}  {detail}")
    assert passed, f"criterion {cid} failed: {detail}"


def test_c01_published_statistics_reproduction():
    t0 = time.perf_counter()
    pairs = list(zip(TABLE2_TEST_ACC["with"], TABLE2_TEST_ACC["without"]))
    gain = mean_accuracy_gain(pairs)
    _, p_acc = paired_t_test([w - wo for w, wo in pairs])
    time_diffs = [wo - w for w, wo in zip(TABLE2_TIMES["with"], TABLE2_TIMES["without"])]
    _, p_time = paired_t_test(time_diffs)
    dt = time.perf_counter() - t0
    ok = (
        abs(gain - 0.0488) <= 0.0005
        and abs(p_acc - 0.0368) <= 0.0005
        and abs(p_time - 0.3104) <= 0.001
        and dt < 1.0
    )
    _report("1", ok, f"gain={gain:.4f} p_acc={p_acc:.4f} p_time={p_time:.4f} ({dt:.2f}s)")


def test_c02_top_set_reproduction():
    t0 = time.perf_counter()
    got = select_top(TABLE1)
    want = {Algorithm.HDBSCAN, Algorithm.GMM, Algorithm.KMEANS, Algorithm.MSAMS}
    dt = time.perf_counter() - t0
    _report("2", got == want and dt < 1.0, f"selected={sorted(a.value for a in got)}")


@pytest.mark.oracle
def test_c03_metric_oracles():
    rng = np.random.default_rng(103)
    worst_ari = worst_nmi = worst_sil = 0.0
    sil_checked = 0
    for trial in range(1000):
        n = int(rng.integers(4, 51))
        a = rng.integers(-1, 5, size=n)
        b = rng.integers(0, 4, size=n)
        worst_ari = max(worst_ari, abs(adjusted_rand_index(a, b) - ari_bruteforce(a.tolist(), b.tolist())))
        worst_nmi = max(
            worst_nmi,
            abs(normalized_mutual_information(a, b) - nmi_bruteforce(a.tolist(), b.tolist())),
        )
        if trial % 3 == 0:
            X = rng.normal(size=(n, int(rng.integers(1, 4))))
            lab = rng.integers(-1, 4, size=n)
            if len(set(lab[lab >= 0].tolist())) >= 2:
                worst_sil = max(
                    worst_sil, abs(silhouette_score(X, lab) - silhouette_bruteforce(X, lab))
                )
                sil_checked += 1
    ok = worst_ari < 1e-12 and worst_nmi < 1e-12 and worst_sil < 1e-12 and sil_checked > 200
    _report(
        "3",
        ok,
        f"max |err|: ari={worst_ari:.2e} nmi={worst_nmi:.2e} sil={worst_sil:.2e} "
        f"({sil_checked} silhouette sets)",
    )


@pytest.mark.oracle
def test_c04_clustering_oracles():
    rng = np.random.default_rng(104)
    # DBSCAN vs naive reference on 100 random sets
    dbscan_ok = True
    for _ in range(100):
        n = int(rng.integers(20, 201))
        X = rng.normal(size=(n, 2)) * rng.uniform(0.4, 2.0)
        eps = float(rng.uniform(0.2, 1.0))
        mp = int(rng.integers(2, 8))
        got = dbscan(X, eps, mp).labels
        want, core = dbscan_bruteforce(X, eps, mp)
        dbscan_ok &= bool(np.array_equal(got == -1, want == -1))
        dbscan_ok &= partitions_equal(got[core], want[core])
    # BIRCH at threshold 0 equals same-seed k-means
    birch_ok = True
    for sd in range(5):
        X = np.random.default_rng(sd).normal(size=(250, 3))
        a = birch(X, k_global=4, seed=RunSeed(sd), threshold=0.0)
        _, b = kmeans(X, 4, RunSeed(sd))
        birch_ok &= bool(np.array_equal(a.labels, b.labels))
    # OPTICS eps-cut equals DBSCAN up to border points
    optics_ok = True
    for _ in range(30):
        n = int(rng.integers(30, 200))
        X = rng.normal(size=(n, 2)) * rng.uniform(0.5, 1.5)
        mp = int(rng.integers(3, 8))
        eps = float(rng.uniform(0.3, 0.9))
        cut = extract_eps_cut(optics(X, min_pts=mp), eps).labels
        want, core = dbscan_bruteforce(X, eps, mp)
        optics_ok &= partitions_equal(cut[core], want[core])
        optics_ok &= not np.any((cut >= 0) & (want == -1))
        disagree = np.flatnonzero((cut == -1) != (want == -1))
        optics_ok &= not np.any(core[disagree])
    # HDBSCAN MST weight equals exhaustive MST on n <= 12
    mst_ok = True
    for _ in range(25):
        n = int(rng.integers(4, 13))
        X = rng.normal(size=(n, 2))
        ms = int(rng.integers(1, min(4, n) + 1))
        core_d = kth_nearest_distance(X, ms, include_self=True)
        _, _, w = prim_mutual_reachability_mst(X, core_d)
        D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
        W = np.maximum(np.maximum(core_d[:, None], core_d[None, :]), D)
        mst_ok &= abs(float(w.sum()) - mst_weight_kruskal(W)) < 1e-9
    ok = dbscan_ok and birch_ok and optics_ok and mst_ok
    _report(
        "4",
        ok,
        f"dbscan={dbscan_ok} birch0={birch_ok} optics_cut={optics_ok} mst={mst_ok}",
    )


@pytest.mark.oracle
def test_c05_optimization_monotonicity():
    from preclust.cluster import gmm_em
    from preclust.classify import train

    rng = np.random.default_rng(105)
    X = np.vstack(
        [rng.normal(size=(150, 3)) * 0.7 + c for c in ((0, 0, 0), (4, 0, 1), (0, 4, 2))]
    )
    y = (rng.random(450) < 0.3).astype(int)
    y[:150] = 0
    model_km, _ = kmeans(X, 5, RunSeed(5))
    km_ok = bool(np.all(np.diff(model_km.inertia_history) <= 1e-9))
    model_gmm, _ = gmm_em(X, 3, RunSeed(5))
    h = np.array(model_gmm.ll_history)
    gmm_ok = bool(np.all(np.diff(h) >= -1e-9 * np.abs(h[:-1])))
    gbm = train(ClassifierKind.GRADIENT_BOOSTING, X, y, RunSeed(5)).model
    gbm_ok = bool(np.all(np.diff(gbm.loss_history_) <= 1e-9))
    lr = train(ClassifierKind.LOGISTIC_REGRESSION, X, y, RunSeed(5)).model
    lr_ok = bool(np.all(np.diff(lr.loss_history_) <= 1e-9))
    ok = km_ok and gmm_ok and gbm_ok and lr_ok
    _report("5", ok, f"kmeans={km_ok} gmm={gmm_ok} gbm={gbm_ok} lr={lr_ok}")


@pytest.mark.oracle
def test_c06_preprocessing_properties():
    rng = np.random.default_rng(106)
    # pruning leaves no surviving pair above the threshold (and duplicates go)
    prune_ok = True
    dup_ok = True
    for _ in range(20):
        n = int(rng.integers(80, 300))
        base = rng.normal(size=(n, 3))
        cols = [
            base[:, 0],
            base[:, 0] + rng.normal(size=n) * 0.01,
            base[:, 1],
            -base[:, 1] * 1.4 + rng.normal(size=n) * 0.05,
            base[:, 2],
            rng.normal(size=n),
            base[:, 0],          # exact duplicate
        ]
        names = tuple(f"f{i}" for i in range(len(cols)))
        frame = SensorFrame(np.arange(n), names, np.column_stack(cols))
        pruned, rep = prune_correlated(frame, 0.8)
        for i in range(pruned.n_features):
            for j in range(i + 1, pruned.n_features):
                if abs(pearson_r(pruned.values[:, i], pruned.values[:, j])) > 0.8:
                    prune_ok = False
        dup_ok &= "f6" not in pruned.feature_names
    # ANOVA: noise channels out (>= 95% over 100 pinned seeds), 5-sigma
    # shifts always kept
    removed = 0
    kept_shifted = 0
    for sd in range(100):
        r = np.random.default_rng(sd)
        n = 600
        y = np.zeros(n, dtype=np.int64)
        y[n // 6 :] = 1
        shifted = r.normal(size=n) + 5.0 * (y == 0)
        noise = [r.normal(size=n) for _ in range(4)]
        frame = SensorFrame(
            np.arange(n),
            ("shifted", "n0", "n1", "n2", "n3"),
            np.column_stack([shifted] + noise),
        )
        _, rep = anova_select(frame, LabelVector(y), 0.05)
        removed += sum(not rep.records[f"n{c}"].kept for c in range(4))
        kept_shifted += rep.records["shifted"].kept
    anova_noise_ok = removed / 400 >= 0.95
    anova_shift_ok = kept_shifted == 100
    ok = prune_ok and dup_ok and anova_noise_ok and anova_shift_ok
    _report(
        "6",
        ok,
        f"prune={prune_ok} dup={dup_ok} noise_removed={removed}/400 shifted_kept={kept_shifted}/100",
    )


@pytest.mark.oracle
def test_c07_smote_properties():
    rng = np.random.default_rng(107)
    ok = True
    for sd in range(10):
        n0 = int(rng.integers(5, 20))
        n1 = int(rng.integers(n0 + 5, 60))
        X = np.vstack([rng.normal(size=(n0, 3)), rng.normal(size=(n1, 3)) + 3.0])
        y = np.array([0] * n0 + [1] * n1)
        X2, y2 = smote(X, y, k=5, seed=RunSeed(sd))
        X3, y3 = smote(X, y, k=5, seed=RunSeed(sd))
        ok &= bool(np.array_equal(X2, X3))
        ok &= int((y2 == 0).sum()) == int((y2 == 1).sum())
        ok &= bool(np.array_equal(X2[: n0 + n1], X))
        minority = X[:n0]
        for p in X2[n0 + n1 :]:
            best = np.inf
            for i in range(n0):
                for j in range(n0):
                    if i == j:
                        continue
                    a, b = minority[i], minority[j]
                    ab = b - a
                    t = float(np.dot(p - a, ab) / np.dot(ab, ab))
                    if -1e-9 <= t <= 1 + 1e-9:
                        best = min(best, float(np.linalg.norm(p - (a + t * ab))))
            ok &= best < 1e-9
    _report("7", ok, "balance, originals, segments, determinism over 10 seeds")


@pytest.mark.oracle
def test_c08_tuning_recovery():
    hits = 0
    knee_ok = 0
    for sd in range(100):
        rng = np.random.default_rng(sd)
        sigma = 0.35
        centers = ((0, 0), (8, 0), (0, 8))
        X = np.vstack([rng.normal(size=(40, 2)) * sigma + c for c in centers])
        frame = SensorFrame(
            np.arange(len(X)), ("a", "b"), X
        )
        pairs = sweep_k(frame, range(2, 9), RunSeed(sd))
        hits += argmax_sweep(pairs) == 3
        # intra-blob neighbor scale from the first blob, brute force
        pts = X[:40]
        means = []
        for i in range(40):
            d = np.sqrt(((pts - pts[i]) ** 2).sum(axis=1))
            d[i] = np.inf
            means.append(np.sort(d)[:4].mean())
        s = float(np.median(means))
        try:
            _, eps = detect_knee(kdistance_curve(frame, 4))
            knee_ok += s / 4 <= eps <= 4 * s
        except Exception:
            pass
    ok = hits >= 95 and knee_ok >= 95
    _report("8", ok, f"argmax k=3 in {hits}/100 seeds; knee within 4x scale in {knee_ok}/100")


@pytest.mark.acceptance
@pytest.mark.slow
def test_c09_directional_replication():
    gains = []
    for sd in range(20):
        import dataclasses

        cfg = dataclasses.replace(PipelineConfig(), seed=sd)
        res = run_pipeline(cfg)
        gains.append(res.comparison.mean_accuracy_gain)
        print(
            f"  seed {sd}: gain {gains[-1]:+.5f} "
            f"(t-test p={res.comparison.p_accuracy:.4f})"
        )
    positive = sum(g > 0 for g in gains)
    t, p = paired_t_test(gains)
    ok = positive >= 18
    _report(
        "9",
        ok,
        f"gain > 0 in {positive}/20 seeds; mean gain {np.mean(gains):+.5f}; "
        f"t-test across seeds p={p:.2e}",
    )


@pytest.mark.acceptance
@pytest.mark.slow
def test_c10_run_all_determinism(tmp_path):
    from preclust.cli import main

    cfg = tmp_path / "cfg.ini"
    cfg.write_text(
        "[synth]\nn_rows = 1200\n\n[tune]\nsubset_fractions = 0.2,0.5\n"
        "eps_grid = 0.2:2.0:0.2\nk_grid = 2:6\n\n[cluster]\nmsams_k_bandwidth = 30\n\n"
        "[classify]\nfolds = 3\nrf_trees = 20\ngbm_stages = 20\n\n[run]\nseed = 3\n"
    )
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = main(["--config", str(cfg), "--out", str(out), "run-all"])
        assert code == 0
        outs.append(out)
    mismatches = []
    files_a = sorted(
        p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file()
    )
    files_b = sorted(
        p.relative_to(outs[1]) for p in outs[1].rglob("*") if p.is_file()
    )
    ok = files_a == files_b
    for rel in files_a:
        if rel.name == "timings.csv":
            continue
        if (outs[0] / rel).read_bytes() != (outs[1] / rel).read_bytes():
            mismatches.append(str(rel))
    ok = ok and not mismatches
    _report("10", ok, f"{len(files_a)} files compared; mismatches={mismatches}")


@pytest.mark.acceptance
@pytest.mark.slow
def test_c11_performance_envelope(tmp_path):
    from preclust.cli import main

    t0 = time.perf_counter()
    code = main(["--out", str(tmp_path / "full"), "--jobs", "1", "run-all"])
    run_all_seconds = time.perf_counter() - t0
    assert code == 0
    t1 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-m", "oracle", "-q", "--no-header"],
        cwd=os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        capture_output=True,
        text=True,
        timeout=900,
    )
    oracle_seconds = time.perf_counter() - t1
    ok = run_all_seconds < 300.0 and oracle_seconds < 180.0 and proc.returncode == 0
    _report(
        "11",
        ok,
        f"run_all={run_all_seconds:.0f}s (<300); oracle suite={oracle_seconds:.0f}s "
        f"(<180, rc={proc.returncode})",
    )
