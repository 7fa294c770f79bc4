"""Shared domain types, deterministic seeding, and numeric primitives.

Everything downstream builds on the four containers defined here
(SensorFrame, NocSchedule, LabelVector, ClusterAssignment), the RunSeed
sub-seeding scheme, and the regularized incomplete beta function that backs
every p-value in the pipeline.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionError, DomainError

# ---------------------------------------------------------------------------
# deterministic RNG
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunSeed:
    """Run-level seed. Every stochastic operation derives its own generator
    from (seed, operation name, invocation index), so re-running a pipeline
    with the same seed is bit-identical regardless of evaluation order.
    """

    seed: int

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def rng(self, op: str, index: int = 0) -> np.random.Generator:
        tag = zlib.crc32(op.encode("utf-8"))
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(tag, index))
        return np.random.default_rng(ss)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SensorFrame:
    """Timestamped feature matrix: rows are observations, columns are named
    sensor channels. `missing` marks cells parsed from non-numeric input;
    after preprocessing every value is finite and `missing` is None.
    """

    timestamps: np.ndarray          # int64 epoch seconds, monotone non-decreasing
    feature_names: tuple[str, ...]
    values: np.ndarray              # float64, shape (n_rows, n_features)
    missing: np.ndarray | None = None   # bool, same shape as values

    def __post_init__(self):
        ts = np.ascontiguousarray(self.timestamps, dtype=np.int64)
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise DimensionError("values must be a 2-d matrix")
        if ts.shape != (vals.shape[0],):
            raise DimensionError("timestamps length must equal row count")
        if len(self.feature_names) != vals.shape[1]:
            raise DimensionError("feature_names length must equal column count")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise DimensionError("feature names must be unique")
        if ts.size > 1 and np.any(np.diff(ts) < 0):
            raise DimensionError("timestamps must be monotone non-decreasing")
        object.__setattr__(self, "timestamps", _freeze(ts))
        object.__setattr__(self, "values", _freeze(vals))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if self.missing is not None:
            m = np.ascontiguousarray(self.missing, dtype=bool)
            if m.shape != vals.shape:
                raise DimensionError("missing mask shape must match values")
            object.__setattr__(self, "missing", _freeze(m))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.feature_names.index(name)
        except ValueError:
            raise KeyError(name) from None
        return self.values[:, j]

    def select_rows(self, idx: np.ndarray) -> "SensorFrame":
        return SensorFrame(
            self.timestamps[idx],
            self.feature_names,
            self.values[idx],
            None if self.missing is None else self.missing[idx],
        )

    def select_columns(self, names) -> "SensorFrame":
        cols = [self.feature_names.index(n) for n in names]
        return SensorFrame(
            self.timestamps,
            tuple(names),
            self.values[:, cols],
            None if self.missing is None else self.missing[:, cols],
        )

    def has_missing(self) -> bool:
        if self.missing is not None and bool(self.missing.any()):
            return True
        return not bool(np.isfinite(self.values).all())


@dataclass(frozen=True)
class NocSchedule:
    """Ordered, disjoint [start, end) intervals (epoch seconds) during which
    the machine is in normal operating condition. Construction canonicalizes:
    intervals are sorted and overlapping or touching ones are merged.
    """

    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        merged = self._merge(self.intervals)
        object.__setattr__(self, "intervals", merged)

    @staticmethod
    def _merge(pairs) -> tuple[tuple[int, int], ...]:
        cleaned = []
        for s, e in pairs:
            s, e = int(s), int(e)
            if s >= e:
                raise ValueError(f"interval start {s} must be < end {e}")
            cleaned.append((s, e))
        cleaned.sort()
        out: list[tuple[int, int]] = []
        for s, e in cleaned:
            if out and s <= out[-1][1]:
                out[-1] = (out[-1][0], max(out[-1][1], e))
            else:
                out.append((s, e))
        return tuple(out)

    def contains(self, timestamps: np.ndarray) -> np.ndarray:
        """Vectorized membership: True where ts falls inside some interval."""
        ts = np.asarray(timestamps, dtype=np.int64)
        if not self.intervals:
            return np.zeros(ts.shape, dtype=bool)
        starts = np.array([s for s, _ in self.intervals], dtype=np.int64)
        ends = np.array([e for _, e in self.intervals], dtype=np.int64)
        pos = np.searchsorted(starts, ts, side="right") - 1
        ok = pos >= 0
        inside = np.zeros(ts.shape, dtype=bool)
        inside[ok] = ts[ok] < ends[pos[ok]]
        return inside

    @property
    def total_seconds(self) -> int:
        return sum(e - s for s, e in self.intervals)


@dataclass(frozen=True)
class LabelVector:
    """Per-row binary class: 1 = NORMAL, 0 = ABNORMAL."""

    labels: np.ndarray

    def __post_init__(self):
        lab = np.ascontiguousarray(self.labels, dtype=np.int64)
        if lab.ndim != 1:
            raise DimensionError("labels must be 1-d")
        bad = ~np.isin(lab, (0, 1))
        if bad.any():
            raise ValueError("labels must be 0 (ABNORMAL) or 1 (NORMAL)")
        object.__setattr__(self, "labels", _freeze(lab))

    def __len__(self) -> int:
        return self.labels.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.labels, dtype=dtype)


def as_labels(y, n_rows: int | None = None) -> np.ndarray:
    """Normalize a LabelVector or array-like to an int64 vector."""
    lab = y.labels if isinstance(y, LabelVector) else np.asarray(y, dtype=np.int64)
    if n_rows is not None and lab.shape[0] != n_rows:
        raise DimensionError(f"label length {lab.shape[0]} != row count {n_rows}")
    return lab


class Algorithm(str, Enum):
    """The clustering algorithms, in the fixed order used for tie-breaking."""

    KMEANS = "kmeans"
    HDBSCAN = "hdbscan"
    OPTICS = "optics"
    BIRCH = "birch"
    GMM = "gmm"
    MSAMS = "msams"
    DBSCAN = "dbscan"   # used by the epsilon sweep, not part of the main six

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: fixed tie-break order for ranking and selection
ALGORITHM_ORDER = (
    Algorithm.KMEANS,
    Algorithm.HDBSCAN,
    Algorithm.OPTICS,
    Algorithm.BIRCH,
    Algorithm.GMM,
    Algorithm.MSAMS,
)


def relabel_contiguous(labels: np.ndarray) -> np.ndarray:
    """Map non-noise labels onto {0..m-1} in order of first appearance;
    noise (-1) is preserved."""
    lab = np.asarray(labels, dtype=np.int64)
    out = np.full(lab.shape, -1, dtype=np.int64)
    mapping: dict[int, int] = {}
    nxt = 0
    for i, v in enumerate(lab):
        if v < 0:
            continue
        v = int(v)
        if v not in mapping:
            mapping[v] = nxt
            nxt += 1
        out[i] = mapping[v]
    return out


@dataclass(frozen=True)
class ClusterAssignment:
    """Result of one clustering run: per-row labels (-1 = noise), the
    algorithm identity, the parameters used, and the measured fit time."""

    algorithm: Algorithm
    labels: np.ndarray
    params: dict = field(default_factory=dict)
    fit_seconds: float = 0.0

    def __post_init__(self):
        lab = np.ascontiguousarray(self.labels, dtype=np.int64)
        if lab.ndim != 1:
            raise DimensionError("labels must be 1-d")
        if lab.size and lab.min() < -1:
            raise ValueError("labels must be >= -1")
        nn = np.unique(lab[lab >= 0])
        if nn.size and (nn[0] != 0 or nn[-1] != nn.size - 1):
            raise ValueError("non-noise labels must form a contiguous set {0..m-1}")
        if self.fit_seconds < 0:
            raise ValueError("fit_seconds must be non-negative")
        object.__setattr__(self, "labels", _freeze(lab))
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))

    @property
    def n_clusters(self) -> int:
        lab = self.labels
        return int(lab[lab >= 0].size and lab.max() + 1)

    @property
    def noise_count(self) -> int:
        return int((self.labels < 0).sum())


# ---------------------------------------------------------------------------
# numeric primitives
# ---------------------------------------------------------------------------


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError(f"vector shapes differ: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def pairwise_sq_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense squared Euclidean distances, clipped at zero. The (x-y)^2 =
    x^2 + y^2 - 2xy expansion keeps the heavy part in BLAS."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    sq_a = np.einsum("ij,ij->i", a, a)
    sq_b = np.einsum("ij,ij->i", b, b)
    d = sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T)
    np.maximum(d, 0.0, out=d)
    return d


_BETA_EPS = 1e-15
_BETA_TINY = 1e-300
_BETA_MAX_ITER = 300


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        de = d * c
        h *= de
        if abs(de - 1.0) < _BETA_EPS:
            return h
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), computed by continued fractions. Monotone in x, exact at
    the boundaries, and satisfies I_x(a,b) + I_{1-x}(b,a) = 1."""
    a, b, x = float(a), float(b), float(x)
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"shape parameters must be positive, got a={a}, b={b}")
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return min(1.0, max(0.0, front * _beta_cf(a, b, x) / a))
    return min(1.0, max(0.0, 1.0 - front * _beta_cf(b, a, 1.0 - x) / b))


def f_survival(f: float, d1: float, d2: float) -> float:
    """P(F > f) for an F-distributed variable with (d1, d2) degrees of freedom."""
    if math.isinf(f):
        return 0.0
    if f <= 0.0:
        return 1.0
    x = d2 / (d2 + d1 * f)
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, x)


def t_two_sided_p(t: float, df: float) -> float:
    """Two-sided tail probability P(|T| > |t|) for Student's t with df dof."""
    if df <= 0:
        raise DomainError("degrees of freedom must be positive")
    t = float(t)
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)
