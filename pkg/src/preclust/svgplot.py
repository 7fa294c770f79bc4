"""Tiny deterministic SVG plotter: axes, polylines, bars, and label strips.

No external plotting dependency; identical inputs produce byte-identical
files (fixed float formatting, no timestamps, stable ordering).
"""

from __future__ import annotations

import numpy as np

PALETTE = (
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
    "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd",
)
_W, _H = 640, 400
_ML, _MR, _MT, _MB = 64, 16, 28, 46


def _f(x: float) -> str:
    return "%.6g" % float(x)


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="18" text-anchor="middle" font-size="14">{_esc(title)}</text>',
    ]


def _axes(xlabel: str, ylabel: str) -> list[str]:
    x0, y0 = _ML, _H - _MB
    x1, y1 = _W - _MR, _MT
    return [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) // 2}" y="{_H - 10}" text-anchor="middle">{_esc(xlabel)}</text>',
        f'<text x="14" y="{(y0 + y1) // 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(y0 + y1) // 2})">{_esc(ylabel)}</text>',
    ]


def _scale(lo, hi):
    if hi <= lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


class _Mapper:
    def __init__(self, xlo, xhi, ylo, yhi):
        self.xlo, self.xhi = _scale(xlo, xhi)
        self.ylo, self.yhi = _scale(ylo, yhi)

    def x(self, v):
        return _ML + (v - self.xlo) / (self.xhi - self.xlo) * (_W - _ML - _MR)

    def y(self, v):
        return (_H - _MB) - (v - self.ylo) / (self.yhi - self.ylo) * (_H - _MB - _MT)


def line_plot(series, title: str, xlabel: str, ylabel: str) -> str:
    """series: list of (x array, y array, label)."""
    xs = np.concatenate([np.asarray(s[0], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    m = _Mapper(xs.min(), xs.max(), ys.min(), ys.max())
    parts = _header(title) + _axes(xlabel, ylabel)
    for tv in _ticks(m.ylo, m.yhi):
        parts.append(
            f'<text x="{_ML - 6}" y="{_f(m.y(tv) + 4)}" text-anchor="end">{_f(tv)}</text>'
        )
    for tv in _ticks(m.xlo, m.xhi):
        parts.append(
            f'<text x="{_f(m.x(tv))}" y="{_H - _MB + 16}" text-anchor="middle">{_f(tv)}</text>'
        )
    for i, (x, y, label) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_f(m.x(a))},{_f(m.y(b))}" for a, b in zip(x, y))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if label:
            parts.append(
                f'<text x="{_W - _MR - 4}" y="{_MT + 14 + 14 * i}" text-anchor="end" '
                f'fill="{color}">{_esc(label)}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bar_chart(labels, values, title: str, ylabel: str) -> str:
    values = np.asarray(values, dtype=float)
    lo = min(0.0, float(values.min()))
    hi = max(0.0, float(values.max()))
    m = _Mapper(0, len(values), lo, hi)
    parts = _header(title) + _axes("", ylabel)
    for tv in _ticks(m.ylo, m.yhi):
        parts.append(
            f'<text x="{_ML - 6}" y="{_f(m.y(tv) + 4)}" text-anchor="end">{_f(tv)}</text>'
        )
    zero_y = m.y(0.0)
    parts.append(
        f'<line x1="{_ML}" y1="{_f(zero_y)}" x2="{_W - _MR}" y2="{_f(zero_y)}" '
        f'stroke="#999" stroke-dasharray="3 3"/>'
    )
    width = (_W - _ML - _MR) / max(len(values), 1)
    for i, (lab, v) in enumerate(zip(labels, values)):
        x = _ML + i * width + 0.15 * width
        y_top = min(m.y(v), zero_y)
        h = abs(m.y(v) - zero_y)
        parts.append(
            f'<rect x="{_f(x)}" y="{_f(y_top)}" width="{_f(0.7 * width)}" height="{_f(h)}" '
            f'fill="{PALETTE[i % len(PALETTE)]}"/>'
        )
        parts.append(
            f'<text x="{_f(x + 0.35 * width)}" y="{_H - _MB + 16}" '
            f'text-anchor="middle">{_esc(str(lab))}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def timeline_strips(rows, title: str) -> str:
    """rows: list of (name, segments), each segment (start_frac, end_frac,
    class_index); class_index -1 renders as grey noise."""
    parts = _header(title)
    n = max(len(rows), 1)
    band = (_H - _MT - _MB) / n
    for i, (name, segments) in enumerate(rows):
        y = _MT + i * band
        parts.append(
            f'<text x="{_ML - 6}" y="{_f(y + band / 2 + 4)}" text-anchor="end">{_esc(name)}</text>'
        )
        for s, e, cls in segments:
            color = "#bbbbbb" if cls < 0 else PALETTE[cls % len(PALETTE)]
            x0 = _ML + s * (_W - _ML - _MR)
            x1 = _ML + e * (_W - _ML - _MR)
            parts.append(
                f'<rect x="{_f(x0)}" y="{_f(y + 2)}" width="{_f(max(x1 - x0, 0.5))}" '
                f'height="{_f(band - 4)}" fill="{color}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def run_length_segments(labels: np.ndarray) -> list[tuple[float, float, int]]:
    """Collapse a label vector into fractional [start, end) strips."""
    labels = np.asarray(labels)
    n = labels.shape[0]
    if n == 0:
        return []
    out = []
    start = 0
    for i in range(1, n + 1):
        if i == n or labels[i] != labels[start]:
            out.append((start / n, i / n, int(labels[start])))
            start = i
    return out
