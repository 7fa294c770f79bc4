"""Sensor-CSV and NoC-file input/output plus the seeded synthetic generator.

File formats (documented bit-exactly in docs/formats.md):

* sensor CSV: UTF-8, comma-separated, header row, first column ``timestamp``
  (integer epoch seconds or ISO-8601), remaining columns numeric. Lines
  starting with ``#`` before the header are comments. Non-numeric or ``NaN``
  cells are read as missing-value markers, not errors. The writer emits
  17-significant-digit decimals so a write/read round trip is lossless.
* NoC CSV: header ``start,end``; each row one [start, end) interval.
  Overlapping intervals are merged on read.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .core import NocSchedule, RunSeed, SensorFrame
from .errors import FormatError


def atomic_write_text(path, text: str) -> None:
    """Write via temp file + rename so partially written artifacts never
    appear under the final name."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _fmt(x: float) -> str:
    return "%.17g" % x


def _parse_timestamp(cell: str, where: str) -> int:
    cell = cell.strip()
    try:
        v = float(cell)
    except ValueError:
        try:
            dt = datetime.fromisoformat(cell)
        except ValueError:
            raise FormatError(f"{where}: cannot parse timestamp {cell!r}") from None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())
    if not math.isfinite(v):
        raise FormatError(f"{where}: non-finite timestamp {cell!r}")
    return int(v)


def _read_rows(path):
    import csv

    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    rows = [r for r in rows if not (r[0].lstrip().startswith("#"))]
    if not rows:
        raise FormatError(f"{path}: empty file")
    return rows


def read_sensor_csv(path) -> SensorFrame:
    """Parse a sensor CSV into a SensorFrame. Rows keep file order;
    non-numeric cells become missing markers; non-monotone timestamps are
    rejected."""
    rows = _read_rows(path)
    header = [c.strip() for c in rows[0]]
    if not header or header[0] != "timestamp":
        raise FormatError(f"{path}: first header column must be 'timestamp'")
    names = header[1:]
    if not names:
        raise FormatError(f"{path}: no feature columns")
    n = len(rows) - 1
    ts = np.empty(n, dtype=np.int64)
    vals = np.full((n, len(names)), np.nan, dtype=np.float64)
    missing = np.zeros((n, len(names)), dtype=bool)
    for i, row in enumerate(rows[1:], start=0):
        if len(row) != len(header):
            raise FormatError(f"{path}: row {i + 2} has {len(row)} cells, expected {len(header)}")
        ts[i] = _parse_timestamp(row[0], f"{path}: row {i + 2}")
        for j, cell in enumerate(row[1:]):
            cell = cell.strip()
            if not cell:
                missing[i, j] = True
                continue
            try:
                v = float(cell)
            except ValueError:
                missing[i, j] = True
                continue
            if math.isnan(v):
                missing[i, j] = True
            else:
                vals[i, j] = v
    if n > 1 and np.any(np.diff(ts) < 0):
        raise FormatError(f"{path}: timestamps are not monotone non-decreasing")
    if not missing.any():
        missing_arg = None
    else:
        missing_arg = missing
    return SensorFrame(ts, tuple(names), vals, missing_arg)


def write_sensor_csv(frame: SensorFrame, path, header_comments: tuple[str, ...] = ()) -> None:
    lines = [f"# {c}" for c in header_comments]
    lines.append(",".join(("timestamp",) + frame.feature_names))
    miss = frame.missing
    for i in range(frame.n_rows):
        cells = [str(int(frame.timestamps[i]))]
        for j in range(frame.n_features):
            if miss is not None and miss[i, j]:
                cells.append("NaN")
            else:
                cells.append(_fmt(frame.values[i, j]))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_noc_csv(path) -> NocSchedule:
    """Parse a NoC schedule; overlapping intervals merge, start >= end is an
    error."""
    rows = _read_rows(path)
    header = [c.strip() for c in rows[0]]
    if header[:2] != ["start", "end"]:
        raise FormatError(f"{path}: header must be 'start,end'")
    pairs = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) < 2:
            raise FormatError(f"{path}: row {i} needs two cells")
        s = _parse_timestamp(row[0], f"{path}: row {i}")
        e = _parse_timestamp(row[1], f"{path}: row {i}")
        if s >= e:
            raise FormatError(f"{path}: row {i}: interval start {s} >= end {e}")
        pairs.append((s, e))
    return NocSchedule(tuple(pairs))


def write_noc_csv(schedule: NocSchedule, path) -> None:
    lines = ["start,end"]
    lines += [f"{s},{e}" for s, e in schedule.intervals]
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# synthetic compressor telemetry
# ---------------------------------------------------------------------------


def default_windows(n_rows: int) -> tuple[tuple[int, int], ...]:
    """Three equal abnormal windows totaling 1/6 of the rows."""
    w = n_rows // 18
    return tuple(
        (int(round(f * n_rows)), int(round(f * n_rows)) + w) for f in (0.15, 0.45, 0.75)
    )


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for the synthetic telemetry generator. Defaults mirror the
    target regime mix: 20,000 rows, 6 informative + 4 correlated + 4 noise
    channels, and three abnormal windows covering 1/6 of the rows (so the
    NORMAL share is 83.33%)."""

    n_rows: int = 20_000
    n_informative: int = 6
    n_correlated: int = 4
    n_noise: int = 4
    abnormal_windows: tuple[tuple[int, int], ...] | None = None
    regime_shift: float = 3.0
    noise_sigma: float = 0.5
    sampling_period_s: float = 60.0

    def windows(self) -> tuple[tuple[int, int], ...]:
        wins = self.abnormal_windows
        if wins is None:
            wins = default_windows(self.n_rows)
        return tuple((int(s), int(e)) for s, e in wins)

    def validate(self) -> None:
        if self.n_rows <= 0:
            raise ValueError("n_rows must be positive")
        if self.n_informative < 1:
            raise ValueError("need at least one informative channel")
        if self.n_correlated < 0 or self.n_noise < 0:
            raise ValueError("channel counts must be non-negative")
        if self.noise_sigma <= 0:
            raise ValueError("noise_sigma must be positive")
        if self.sampling_period_s <= 0:
            raise ValueError("sampling_period_s must be positive")
        wins = self.windows()
        prev_end = None
        for s, e in sorted(wins):
            if not (0 <= s < e <= self.n_rows):
                raise ValueError(f"window ({s}, {e}) outside [0, {self.n_rows})")
            if prev_end is not None and s < prev_end:
                raise ValueError("abnormal windows must be disjoint")
            prev_end = e


def generate_synthetic(config: SynthConfig, seed: RunSeed) -> tuple[SensorFrame, NocSchedule]:
    """Deterministic stand-in for plant telemetry.

    Informative channels carry a smooth two-sinusoid base signal plus
    Gaussian noise, offset by a mean shift of magnitude ``regime_shift``
    inside the abnormal windows; the shift's sign is drawn per (window,
    channel), so different fault periods push the sensors in different
    directions and form distinct abnormal regimes. Correlated channels are
    affine copies of informative ones (|r| > 0.9 by construction); noise
    channels are pure Gaussian noise. The returned schedule covers exactly
    the rows outside the abnormal windows.
    """
    config.validate()
    rng = seed.rng("generate_synthetic")
    n = config.n_rows
    t = np.arange(n, dtype=np.float64)
    windows = tuple(sorted(config.windows()))
    abnormal = np.zeros(n, dtype=bool)
    for s, e in windows:
        abnormal[s:e] = True
    shift_signs = rng.choice((-1.0, 1.0), size=(len(windows), config.n_informative))

    names: list[str] = []
    cols: list[np.ndarray] = []
    informative: list[np.ndarray] = []
    for i in range(config.n_informative):
        p1 = rng.uniform(17.0, 41.0)
        p2 = rng.uniform(5.0, 13.0)
        ph1 = rng.uniform(0.0, 2.0 * np.pi)
        ph2 = rng.uniform(0.0, 2.0 * np.pi)
        a1 = rng.uniform(0.8, 1.4)
        a2 = rng.uniform(0.4, 0.8)
        base = a1 * np.sin(2.0 * np.pi * t / p1 + ph1) + a2 * np.sin(2.0 * np.pi * t / p2 + ph2)
        x = base + rng.normal(0.0, config.noise_sigma, size=n)
        for w, (ws, we) in enumerate(windows):
            x[ws:we] += shift_signs[w, i] * config.regime_shift
        names.append(f"informative_{i}")
        cols.append(x)
        informative.append(x)
    for i in range(config.n_correlated):
        parent = informative[i % config.n_informative]
        a = rng.uniform(0.6, 1.6) * rng.choice((-1.0, 1.0))
        b = rng.uniform(-1.0, 1.0)
        tiny = 0.05 * float(parent.std())
        y = a * parent + b + rng.normal(0.0, tiny, size=n)
        names.append(f"correlated_{i}")
        cols.append(y)
    for i in range(config.n_noise):
        names.append(f"noise_{i}")
        cols.append(rng.normal(0.0, config.noise_sigma, size=n))

    values = np.column_stack(cols)
    period = config.sampling_period_s
    timestamps = np.asarray(np.round(t * period), dtype=np.int64)

    def row_time(r: int) -> int:
        return int(round(r * period))

    normal_intervals: list[tuple[int, int]] = []
    cursor = 0
    for s, e in windows:
        if s > cursor:
            normal_intervals.append((row_time(cursor), row_time(s)))
        cursor = e
    if cursor < n:
        normal_intervals.append((row_time(cursor), row_time(n)))
    frame = SensorFrame(timestamps, tuple(names), values)
    return frame, NocSchedule(tuple(normal_intervals))
