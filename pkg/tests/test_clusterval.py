import numpy as np
import pytest

from preclust.clusterval import (
    adjusted_rand_index,
    normalized_mutual_information,
    period_labels,
    rank_and_select,
    select_top,
    ValidationRow,
)
from preclust.core import Algorithm, NocSchedule, SensorFrame
from preclust.errors import DimensionError

from oracles import ari_bruteforce, nmi_bruteforce


def frame_with_ts(ts):
    ts = np.asarray(ts)
    return SensorFrame(ts, ("x",), np.zeros((len(ts), 1)))


class TestPeriodLabels:
    def test_empty_schedule_single_period(self):
        f = frame_with_ts(np.arange(5))
        assert period_labels(f, NocSchedule(())).tolist() == [0] * 5

    def test_run_length_hand_case(self):
        # states N N A A N -> periods 0 0 1 1 2
        f = frame_with_ts([0, 1, 2, 3, 4])
        sched = NocSchedule(((0, 2), (4, 5)))
        assert period_labels(f, sched).tolist() == [0, 0, 1, 1, 2]

    def test_default_synthetic_has_seven_periods(self):
        from preclust.core import RunSeed
        from preclust.ingest import SynthConfig, generate_synthetic

        frame, sched = generate_synthetic(SynthConfig(n_rows=3600), RunSeed(0))
        p = period_labels(frame, sched)
        assert p.max() + 1 == 7   # 3 abnormal windows + 4 normal stretches


class TestAri:
    def test_identical(self):
        assert adjusted_rand_index([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0

    def test_permutation_invariance(self):
        assert adjusted_rand_index([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0

    def test_hand_contingency(self):
        got = adjusted_rand_index([0, 0, 0, 1, 1, 1], [0, 0, 1, 1, 2, 2])
        assert got == pytest.approx(0.2424, abs=1e-4)
        assert got == pytest.approx((2 - 1.2) / (4.5 - 1.2), abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            adjusted_rand_index([0, 1], [0, 1, 2])

    @pytest.mark.oracle
    def test_matches_bruteforce(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(2, 30))
            a = rng.integers(-1, 4, size=n)
            b = rng.integers(-1, 3, size=n)
            assert adjusted_rand_index(a, b) == pytest.approx(
                ari_bruteforce(a.tolist(), b.tolist()), abs=1e-12
            )

    @pytest.mark.oracle
    def test_near_zero_under_independence(self):
        rng = np.random.default_rng(1)
        vals = []
        for _ in range(1000):
            a = rng.integers(0, 4, size=40)
            b = rng.integers(0, 4, size=40)
            vals.append(adjusted_rand_index(a, b))
        assert abs(float(np.mean(vals))) < 0.02


class TestNmi:
    def test_identical_nontrivial(self):
        assert normalized_mutual_information([0, 1, 0, 2], [0, 1, 0, 2]) == 1.0

    def test_independent_is_zero(self):
        assert normalized_mutual_information([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0

    def test_both_single_cluster(self):
        assert normalized_mutual_information([0, 0, 0], [1, 1, 1]) == 1.0

    @pytest.mark.oracle
    def test_matches_histogram_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            n = int(rng.integers(1, 13))
            a = rng.integers(-1, 3, size=n)
            b = rng.integers(0, 4, size=n)
            for avg in ("mean", "min", "max", "geometric"):
                got = normalized_mutual_information(a, b, avg)
                want = nmi_bruteforce(a.tolist(), b.tolist(), avg)
                assert got == pytest.approx(want, abs=1e-12)

    @pytest.mark.oracle
    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(2, 20))
            a = rng.integers(0, 3, size=n)
            b = rng.integers(0, 4, size=n)
            assert normalized_mutual_information(a, b) == pytest.approx(
                normalized_mutual_information(b, a), abs=1e-12
            )
            assert adjusted_rand_index(a, b) == pytest.approx(
                adjusted_rand_index(b, a), abs=1e-12
            )


class TestSelectTop:
    TABLE = {
        Algorithm.KMEANS: (0.30, 0.42),
        Algorithm.HDBSCAN: (0.55, 0.64),
        Algorithm.OPTICS: (-0.02, 0.16),
        Algorithm.BIRCH: (0.03, 0.25),
        Algorithm.GMM: (0.45, 0.56),
        Algorithm.MSAMS: (0.35, 0.36),
    }

    def test_reported_metric_table(self):
        got = select_top(self.TABLE)
        assert got == {Algorithm.HDBSCAN, Algorithm.GMM, Algorithm.KMEANS, Algorithm.MSAMS}

    def test_all_equal_tie_break(self):
        metrics = {a: (0.5, 0.5) for a in self.TABLE}
        got = select_top(metrics)
        assert got == {Algorithm.KMEANS, Algorithm.HDBSCAN, Algorithm.OPTICS}

    def test_single_algorithm(self):
        got = select_top({Algorithm.GMM: (0.1, 0.1)})
        assert got == {Algorithm.GMM}

    def test_selected_size_bounds(self):
        rows = [
            ValidationRow(a, ari, nmi, 0.0, 0.0)
            for a, (ari, nmi) in self.TABLE.items()
        ]
        ranked = rank_and_select(rows)
        sel = [r for r in ranked if r.selected]
        assert 3 <= len(sel) <= 6
        ari_rank = sorted(ranked, key=lambda r: r.rank_ari)
        assert [r.rank_ari for r in ari_rank] == [1, 2, 3, 4, 5, 6]
        for r in ranked[:3]:
            if r.rank_ari <= 3 or r.rank_nmi <= 3:
                assert r.selected
