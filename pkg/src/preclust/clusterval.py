"""External validation of clusterings against the NoC-derived period
labels: adjusted Rand index, normalized mutual information, per-metric
ranking, and the top-set selection that decides which algorithms feed the
enrichment stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ALGORITHM_ORDER, Algorithm, NocSchedule, SensorFrame
from .errors import DimensionError
from .ingest import atomic_write_text


def period_labels(frame: SensorFrame, schedule: NocSchedule) -> np.ndarray:
    """Each maximal run of rows sharing the same NORMAL/ABNORMAL state gets
    its own period id, numbered in time order."""
    state = schedule.contains(frame.timestamps).astype(np.int64)
    if state.size == 0:
        return np.zeros(0, dtype=np.int64)
    change = np.empty(state.shape, dtype=bool)
    change[0] = True
    change[1:] = state[1:] != state[:-1]
    return np.cumsum(change) - 1


def _check_pair(a, b, min_len=1):
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"label lengths differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] < min_len:
        raise DimensionError(f"need at least {min_len} labels")
    return a, b


def _contingency(a, b):
    ua, ia = np.unique(a, return_inverse=True)
    ub, ib = np.unique(b, return_inverse=True)
    counts = np.zeros((ua.size, ub.size), dtype=np.int64)
    np.add.at(counts, (ia, ib), 1)
    return counts


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected pair-counting agreement. Noise (-1) counts as an
    ordinary label, so heavily-noisy clusterings pay for it."""
    a, b = _check_pair(a, b, min_len=2)
    nij = _contingency(a, b)
    ai = nij.sum(axis=1)
    bj = nij.sum(axis=0)
    n = int(ai.sum())

    def c2(x):
        x = np.asarray(x, dtype=np.float64)
        return (x * (x - 1.0) / 2.0).sum()

    index = c2(nij)
    sum_a, sum_b = c2(ai), c2(bj)
    total = n * (n - 1.0) / 2.0
    expected = sum_a * sum_b / total
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


def normalized_mutual_information(a, b, average: str = "mean") -> float:
    """MI normalized by the mean (default; min/max/geometric available) of
    the two label entropies, natural logs. Two single-cluster partitions
    agree perfectly (1.0); zero MI gives 0."""
    a, b = _check_pair(a, b, min_len=1)
    nij = _contingency(a, b)
    n = a.shape[0]
    pij = nij / n
    pa = pij.sum(axis=1)
    pb = pij.sum(axis=0)
    ha = float(-(pa * np.log(pa, where=pa > 0, out=np.zeros_like(pa))).sum())
    hb = float(-(pb * np.log(pb, where=pb > 0, out=np.zeros_like(pb))).sum())
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / np.outer(pa, pb)[nz])).sum())
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if mi <= 0.0:
        return 0.0
    if average == "mean":
        denom = 0.5 * (ha + hb)
    elif average == "min":
        denom = min(ha, hb)
    elif average == "max":
        denom = max(ha, hb)
    elif average == "geometric":
        denom = math.sqrt(ha * hb)
    else:
        raise ValueError(f"unknown normalization {average!r}")
    if denom <= 0.0:
        return 0.0
    return float(min(mi / denom, 1.0))


@dataclass(frozen=True)
class ValidationRow:
    algorithm: Algorithm
    ari: float
    nmi: float
    ari_binary: float      # against the raw NORMAL/ABNORMAL labels
    nmi_binary: float
    rank_ari: int = 0
    rank_nmi: int = 0
    selected: bool = False


def _order_index(algo: Algorithm) -> int:
    try:
        return ALGORITHM_ORDER.index(algo)
    except ValueError:
        return len(ALGORITHM_ORDER)


def rank_and_select(rows: list[ValidationRow], top: int = 3) -> list[ValidationRow]:
    """Rank per metric (ties broken by the fixed algorithm order) and flag
    the union of both metric-wise top-`top` sets as selected."""
    if not rows:
        raise ValueError("need at least one validation row")
    by_ari = sorted(rows, key=lambda r: (-r.ari, _order_index(r.algorithm)))
    by_nmi = sorted(rows, key=lambda r: (-r.nmi, _order_index(r.algorithm)))
    rank_ari = {r.algorithm: i + 1 for i, r in enumerate(by_ari)}
    rank_nmi = {r.algorithm: i + 1 for i, r in enumerate(by_nmi)}
    chosen = {r.algorithm for r in by_ari[:top]} | {r.algorithm for r in by_nmi[:top]}
    return [
        ValidationRow(
            r.algorithm,
            r.ari,
            r.nmi,
            r.ari_binary,
            r.nmi_binary,
            rank_ari[r.algorithm],
            rank_nmi[r.algorithm],
            r.algorithm in chosen,
        )
        for r in rows
    ]


def select_top(metrics: dict[Algorithm, tuple[float, float]], top: int = 3) -> set[Algorithm]:
    """Union of the top-`top` algorithms by ARI and by NMI."""
    rows = [
        ValidationRow(algo, ari, nmi, float("nan"), float("nan"))
        for algo, (ari, nmi) in metrics.items()
    ]
    return {r.algorithm for r in rank_and_select(rows, top) if r.selected}


def validate_assignments(
    assignments,
    frame: SensorFrame,
    schedule: NocSchedule,
    binary_labels,
    nmi_average: str = "mean",
) -> list[ValidationRow]:
    """Score every assignment against the period ids (primary) and the
    binary NORMAL labels (secondary), then rank and select."""
    periods = period_labels(frame, schedule)
    y = np.asarray(binary_labels).ravel()
    rows = []
    for a in assignments:
        rows.append(
            ValidationRow(
                a.algorithm,
                adjusted_rand_index(a.labels, periods),
                normalized_mutual_information(a.labels, periods, nmi_average),
                adjusted_rand_index(a.labels, y),
                normalized_mutual_information(a.labels, y, nmi_average),
            )
        )
    return rank_and_select(rows)


def validation_table_csv(rows: list[ValidationRow], path) -> None:
    lines = ["algorithm,ari,nmi,ari_binary,nmi_binary,rank_ari,rank_nmi,selected"]
    for r in rows:
        lines.append(
            f"{r.algorithm.value},{r.ari:.6f},{r.nmi:.6f},"
            f"{r.ari_binary:.6f},{r.nmi_binary:.6f},{r.rank_ari},{r.rank_nmi},{int(r.selected)}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def validation_table_markdown(rows: list[ValidationRow], path, top: int = 3) -> None:
    lines = [
        "| algorithm | ARI | NMI |",
        "| --- | --- | --- |",
    ]
    for r in rows:
        ari = f"**{r.ari:.2f}\\***" if r.rank_ari <= top else f"{r.ari:.2f}"
        nmi = f"**{r.nmi:.2f}\\***" if r.rank_nmi <= top else f"{r.nmi:.2f}"
        lines.append(f"| {r.algorithm.value.upper()} | {ari} | {nmi} |")
    lines.append("")
    lines.append(f"selected for enrichment: "
                 f"{', '.join(sorted(r.algorithm.value for r in rows if r.selected))}")
    atomic_write_text(path, "\n".join(lines) + "\n")
