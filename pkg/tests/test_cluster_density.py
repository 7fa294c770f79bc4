"""DBSCAN, OPTICS, HDBSCAN, and mean-shift tests."""

import numpy as np
import pytest

from preclust.cluster import (
    dbscan,
    extract_eps_cut,
    flat_mean_shift_step,
    hdbscan,
    kth_nearest_distance,
    mean_shift_adaptive,
    optics,
    run_all,
)
from preclust.clusterval import adjusted_rand_index
from preclust.core import Algorithm, RunSeed

from oracles import dbscan_bruteforce, mst_weight_kruskal, partitions_equal


def blobs(rng, centers, n_per, sigma):
    pts, labels = [], []
    for ci, c in enumerate(centers):
        pts.append(rng.normal(size=(n_per, len(c))) * sigma + np.asarray(c))
        labels += [ci] * n_per
    return np.vstack(pts), np.array(labels)


class TestDbscan:
    def test_everything_one_cluster(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(40, 2))
        diam = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1)).max()
        a = dbscan(X, diam + 1.0, min_pts=5)
        assert np.all(a.labels == 0)

    def test_everything_noise(self):
        X = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
        a = dbscan(X, 0.5, min_pts=2)
        assert np.all(a.labels == -1)

    @pytest.mark.oracle
    def test_matches_reference_implementation(self):
        rng = np.random.default_rng(3)
        for trial in range(25):
            n = int(rng.integers(20, 200))
            X = rng.normal(size=(n, 2)) * rng.uniform(0.5, 2.0)
            eps = float(rng.uniform(0.2, 1.0))
            min_pts = int(rng.integers(2, 8))
            got = dbscan(X, eps, min_pts).labels
            want, core = dbscan_bruteforce(X, eps, min_pts)
            # identical core-point partition and noise set; border points may
            # only differ by which adjacent cluster claimed them
            assert np.array_equal(got == -1, want == -1)
            assert partitions_equal(got[core], want[core])

    @pytest.mark.oracle
    def test_row_permutation_stability(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(120, 2))
        base, core = dbscan_bruteforce(X, 0.6, 4)
        for _ in range(3):
            perm = rng.permutation(len(X))
            got = dbscan(X[perm], 0.6, 4).labels
            assert partitions_equal(got[core[perm]], base[perm][core[perm]])

    def test_precomputed_distances_agree(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(80, 2))
        D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
        a = dbscan(X, 0.7, 4)
        b = dbscan(X, 0.7, 4, distances=D)
        assert np.array_equal(a.labels, b.labels)


class TestOptics:
    def test_first_point_reachability_undefined(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(50, 2))
        res = optics(X, min_pts=5)
        assert np.isinf(res.reachability[0])
        assert np.isfinite(res.reachability[1:]).all()

    def test_two_blobs_two_valleys(self):
        rng = np.random.default_rng(2)
        X, truth = blobs(rng, [(0, 0), (30, 0)], 80, 0.5)
        res = optics(X, min_pts=20, xi=0.05)
        labels = res.assignment.labels
        assert labels[labels >= 0].max() + 1 == 2
        keep = labels >= 0
        assert adjusted_rand_index(labels[keep], truth[keep]) > 0.98
        # the reachability plot itself shows the two valleys: exactly one
        # interior spike separating them
        r = res.reachability
        interior = r[1:]
        spikes = interior > 5.0
        assert spikes.sum() == 1

    @pytest.mark.oracle
    def test_eps_cut_reproduces_dbscan(self):
        rng = np.random.default_rng(5)
        for trial in range(15):
            n = int(rng.integers(30, 200))
            X = rng.normal(size=(n, 2)) * rng.uniform(0.5, 1.5)
            min_pts = int(rng.integers(3, 8))
            eps = float(rng.uniform(0.3, 0.9))
            res = optics(X, min_pts=min_pts)
            cut = extract_eps_cut(res, eps).labels
            want, core = dbscan_bruteforce(X, eps, min_pts)
            # identical partition on core points; any disagreement is a
            # border point, which the cut may miss (noise) but never invent
            assert partitions_equal(cut[core], want[core])
            assert not np.any((cut >= 0) & (want == -1))
            disagreements = np.flatnonzero((cut == -1) != (want == -1))
            assert not np.any(core[disagreements])


class TestHdbscan:
    def test_two_blobs_exact(self):
        rng = np.random.default_rng(7)
        X, truth = blobs(rng, [(0, 0), (10, 0)], 100, 0.1)
        tree, assign = hdbscan(X, min_cluster_size=10)
        labels = assign.labels
        assert labels[labels >= 0].max() + 1 == 2
        assert adjusted_rand_index(labels, truth) >= 0.99

    def test_degenerate_min_cluster_size(self):
        rng = np.random.default_rng(8)
        X = rng.random((60, 2))
        _, assign = hdbscan(X, min_cluster_size=60)
        labels = assign.labels
        n_clusters = labels[labels >= 0].max() + 1 if (labels >= 0).any() else 0
        assert n_clusters in (0, 1)

    def test_cluster_sizes_respect_minimum(self):
        rng = np.random.default_rng(9)
        X, _ = blobs(rng, [(0, 0), (6, 6), (12, 0)], 50, 0.4)
        mcs = 12
        _, assign = hdbscan(X, min_cluster_size=mcs)
        labels = assign.labels
        for c in range(labels.max() + 1):
            assert (labels == c).sum() >= mcs

    @pytest.mark.oracle
    def test_mst_weight_matches_exhaustive(self):
        from preclust.cluster._kernels import prim_mutual_reachability_mst

        rng = np.random.default_rng(10)
        for trial in range(20):
            n = int(rng.integers(4, 13))
            X = rng.normal(size=(n, 2))
            ms = int(rng.integers(1, min(4, n) + 1))
            core = kth_nearest_distance(X, ms, include_self=True)
            _, _, w = prim_mutual_reachability_mst(X, core)
            D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
            W = np.maximum(np.maximum(core[:, None], core[None, :]), D)
            assert float(w.sum()) == pytest.approx(mst_weight_kruskal(W), abs=1e-9)

    def test_condensed_tree_lambda_monotone(self):
        rng = np.random.default_rng(11)
        X, _ = blobs(rng, [(0, 0), (8, 0)], 60, 0.5)
        tree, _ = hdbscan(X, min_cluster_size=10)
        birth = {tree.root: 0.0}
        for e in tree.edges:
            if e.child >= tree.n_points:
                birth[e.child] = e.lam
        for e in tree.edges:
            assert e.lam >= birth[e.parent] - 1e-12


class TestMeanShift:
    def test_single_blob_single_cluster(self):
        rng = np.random.default_rng(12)
        X = rng.normal(size=(150, 2)) * 0.2
        a = mean_shift_adaptive(X, k_bandwidth=90)
        assert np.all(a.labels == a.labels[0])
        assert a.n_clusters == 1

    def test_two_far_blobs(self):
        rng = np.random.default_rng(13)
        sigma = 0.4
        X, truth = blobs(rng, [(0, 0), (10 * 10 * sigma, 0)], 100, sigma)
        a = mean_shift_adaptive(X, k_bandwidth=80)
        assert a.n_clusters == 2
        assert adjusted_rand_index(a.labels, truth) == 1.0

    def test_converged_mode_is_fixed_point(self):
        rng = np.random.default_rng(14)
        X = rng.normal(size=(120, 2)) * 0.5
        k = 80
        a = mean_shift_adaptive(X, k_bandwidth=k)
        h = kth_nearest_distance(X, k, include_self=False)
        tol = 1e-5 * float(np.median(h))
        # rebuild each cluster's mode by rerunning a representative seed
        reps = [int(np.argmax(a.labels == c)) for c in range(a.n_clusters)]
        modes = X[reps].copy()
        for _ in range(300):
            nxt = flat_mean_shift_step(X, modes, h)
            if np.sqrt(((nxt - modes) ** 2).sum(1)).max() <= tol:
                modes = nxt
                break
            modes = nxt
        once_more = flat_mean_shift_step(X, modes, h)
        assert np.sqrt(((once_more - modes) ** 2).sum(1)).max() <= tol

    def test_bandwidth_floor_warning(self):
        X = np.zeros((30, 2))
        with pytest.warns(UserWarning):
            a = mean_shift_adaptive(X, k_bandwidth=5)
        assert a.n_clusters == 1


class TestRunAll:
    def test_six_assignments_and_params_echo(self):
        rng = np.random.default_rng(15)
        X, _ = blobs(rng, [(0, 0), (6, 0), (0, 6)], 70, 0.4)
        res = run_all(X, chosen_k=6, chosen_epsilon=0.8, seed=RunSeed(0))
        assert len(res.assignments) == 6
        assert not res.failures
        assert res.params["k"] == 6.0
        assert res.params["epsilon"] == 0.8
        algos = [a.algorithm for a in res.assignments]
        assert algos == [
            Algorithm.KMEANS,
            Algorithm.HDBSCAN,
            Algorithm.OPTICS,
            Algorithm.BIRCH,
            Algorithm.GMM,
            Algorithm.MSAMS,
        ]
        for a in res.assignments:
            assert a.fit_seconds >= 0.0

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(16)
        X, _ = blobs(rng, [(0, 0), (5, 5)], 60, 0.5)
        r1 = run_all(X, 2, 0.5, RunSeed(11))
        r2 = run_all(X, 2, 0.5, RunSeed(11))
        for a, b in zip(r1.assignments, r2.assignments):
            assert np.array_equal(a.labels, b.labels)

    def test_unknown_override_rejected(self):
        with pytest.raises(ValueError):
            run_all(np.zeros((30, 2)), 2, 0.5, RunSeed(0), overrides={"nope": 1})
