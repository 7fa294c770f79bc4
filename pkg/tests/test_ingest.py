import numpy as np
import pytest

from preclust.core import RunSeed, SensorFrame, t_two_sided_p
from preclust.errors import FormatError
from preclust.ingest import (
    SynthConfig,
    default_windows,
    generate_synthetic,
    read_noc_csv,
    read_sensor_csv,
    write_noc_csv,
    write_sensor_csv,
)
from preclust.preprocess import label_from_noc

from oracles import interval_membership, pearson_r


class TestSensorCsv:
    def test_direct_parse(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("timestamp,a,b\n0,1.5,2\n60,3,4\n120,5,6\n")
        f = read_sensor_csv(p)
        assert f.n_rows == 3 and f.n_features == 2
        assert f.values[0, 0] == 1.5
        assert f.timestamps.tolist() == [0, 60, 120]

    def test_nan_cell_becomes_missing(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("timestamp,a\n0,NaN\n60,2\n")
        f = read_sensor_csv(p)
        assert f.missing is not None and f.missing[0, 0]
        assert not f.missing[1, 0]
        assert f.n_rows == 2  # row retained for preprocess to drop

    def test_non_numeric_cell_becomes_missing(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("timestamp,a\n0,oops\n60,2\n")
        f = read_sensor_csv(p)
        assert f.missing[0, 0] and not f.missing[1, 0]

    def test_iso_timestamps(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("timestamp,a\n1970-01-01T00:00:00+00:00,1\n1970-01-01T00:01:00+00:00,2\n")
        f = read_sensor_csv(p)
        assert f.timestamps.tolist() == [0, 60]

    def test_missing_header_rejected(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("time,a\n0,1\n")
        with pytest.raises(FormatError):
            read_sensor_csv(p)

    def test_non_monotone_rejected(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("timestamp,a\n60,1\n0,2\n")
        with pytest.raises(FormatError):
            read_sensor_csv(p)

    def test_round_trip_identity(self, tmp_path):
        rng = np.random.default_rng(5)
        vals = rng.normal(size=(40, 3)) * 10.0 ** rng.integers(-8, 8, size=(40, 3))
        frame = SensorFrame(np.arange(40) * 60, ("x", "y", "z"), vals)
        p = tmp_path / "rt.csv"
        write_sensor_csv(frame, p)
        back = read_sensor_csv(p)
        assert np.max(np.abs(back.values - frame.values)) < 1e-12
        assert back.feature_names == frame.feature_names
        assert np.array_equal(back.timestamps, frame.timestamps)

    def test_comment_lines_skipped(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("# provenance: demo\ntimestamp,a\n0,1\n")
        f = read_sensor_csv(p)
        assert f.n_rows == 1


class TestNocCsv:
    def test_two_intervals(self, tmp_path):
        p = tmp_path / "n.csv"
        p.write_text("start,end\n0,10\n20,30\n")
        s = read_noc_csv(p)
        assert s.intervals == ((0, 10), (20, 30))

    def test_overlap_merged(self, tmp_path):
        p = tmp_path / "n.csv"
        p.write_text("start,end\n0,10\n5,15\n")
        s = read_noc_csv(p)
        assert s.intervals == ((0, 15),)

    def test_start_ge_end_rejected(self, tmp_path):
        p = tmp_path / "n.csv"
        p.write_text("start,end\n10,10\n")
        with pytest.raises(FormatError):
            read_noc_csv(p)

    @pytest.mark.oracle
    def test_random_intervals_match_membership_oracle(self, tmp_path):
        rng = np.random.default_rng(17)
        starts = rng.integers(0, 500, size=100)
        raw = [(int(s), int(s + rng.integers(1, 40))) for s in starts]
        p = tmp_path / "n.csv"
        p.write_text("start,end\n" + "\n".join(f"{s},{e}" for s, e in raw) + "\n")
        sched = read_noc_csv(p)
        ts = np.arange(0, 560)
        want = interval_membership(ts, raw)
        got = sched.contains(ts).astype(np.int64)
        assert np.array_equal(got, want)
        # canonical invariants: sorted, disjoint
        for (s1, e1), (s2, e2) in zip(sched.intervals, sched.intervals[1:]):
            assert e1 < s2

    def test_round_trip(self, tmp_path):
        from preclust.core import NocSchedule

        s = NocSchedule(((0, 10), (20, 30)))
        p = tmp_path / "n.csv"
        write_noc_csv(s, p)
        assert read_noc_csv(p).intervals == s.intervals


class TestSyntheticGenerator:
    def test_normal_fraction_default_config(self):
        cfg = SynthConfig()
        frame, sched = generate_synthetic(cfg, RunSeed(0))
        labels = label_from_noc(frame, sched)
        frac = float(np.mean(np.asarray(labels)))
        assert abs(frac - 0.8333) <= 0.001

    def test_schedule_covers_exactly_non_abnormal_rows(self):
        cfg = SynthConfig(n_rows=2400)
        frame, sched = generate_synthetic(cfg, RunSeed(3))
        labels = np.asarray(label_from_noc(frame, sched))
        abnormal = np.zeros(cfg.n_rows, dtype=bool)
        for s, e in cfg.windows():
            abnormal[s:e] = True
        assert np.array_equal(labels == 0, abnormal)

    def test_deterministic_per_seed(self):
        cfg = SynthConfig(n_rows=600)
        f1, s1 = generate_synthetic(cfg, RunSeed(9))
        f2, s2 = generate_synthetic(cfg, RunSeed(9))
        assert np.array_equal(f1.values, f2.values)
        assert s1.intervals == s2.intervals
        f3, _ = generate_synthetic(cfg, RunSeed(10))
        assert not np.array_equal(f1.values, f3.values)

    def test_correlated_channels_track_parents(self):
        cfg = SynthConfig(n_rows=4000)
        frame, _ = generate_synthetic(cfg, RunSeed(1))
        for i in range(cfg.n_correlated):
            parent = frame.column(f"informative_{i % cfg.n_informative}")
            child = frame.column(f"correlated_{i}")
            assert abs(pearson_r(parent, child)) > 0.9

    @pytest.mark.oracle
    def test_null_shift_statistically_flat(self):
        # with regime_shift = 0 the inside/outside means should agree: the
        # pooled two-sample t-test should stay above p = 0.01 nearly always
        cfg = SynthConfig(n_rows=2400, regime_shift=0.0)
        abnormal = np.zeros(cfg.n_rows, dtype=bool)
        for s, e in cfg.windows():
            abnormal[s:e] = True
        ok = 0
        total = 0
        for sd in range(100):
            frame, _ = generate_synthetic(cfg, RunSeed(sd))
            for i in range(cfg.n_informative):
                x = frame.column(f"informative_{i}")
                a, b = x[abnormal], x[~abnormal]
                na, nb = len(a), len(b)
                var = ((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()
                var /= na + nb - 2
                t = (a.mean() - b.mean()) / np.sqrt(var * (1.0 / na + 1.0 / nb))
                p = t_two_sided_p(float(t), na + nb - 2)
                total += 1
                ok += p > 0.01
        assert ok / total >= 0.95

    def test_default_windows_cover_sixth(self):
        wins = default_windows(18_000)
        assert sum(e - s for s, e in wins) == 3000

    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            generate_synthetic(SynthConfig(n_rows=100, abnormal_windows=((50, 200),)), RunSeed(0))
        with pytest.raises(ValueError):
            generate_synthetic(SynthConfig(noise_sigma=0.0), RunSeed(0))
