"""Minimal deterministic SVG rendering for the analysis curves.

Hand-rolled on purpose: every byte of the output is a pure function of the
data, so re-running a command reproduces identical files. Plots are a mean
polyline with a semi-transparent ribbon of plus/minus one standard
deviation, an optional dashed baseline, and an optional diagonal
reference line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .binning import BinnedCurve
from .tables import atomic_write_text

WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 72, 24, 44, 56

PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


@dataclass(frozen=True)
class CurveSeries:
    label: str
    x: np.ndarray
    mean: np.ndarray
    sd: Optional[np.ndarray] = None

    @classmethod
    def from_binned(cls, label: str, curve: BinnedCurve) -> "CurveSeries":
        keep = curve.populated()
        return cls(label=label, x=curve.centers[keep],
                   mean=curve.means[keep], sd=curve.sds[keep])


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * abs(hi):
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt_num(v: float) -> str:
    return f"{v:.4g}"


class _Canvas:
    def __init__(self, x_lo, x_hi, y_lo, y_hi, log_x=False):
        self.log_x = log_x
        self.x_lo = math.log10(x_lo) if log_x else x_lo
        self.x_hi = math.log10(x_hi) if log_x else x_hi
        self.y_lo, self.y_hi = y_lo, y_hi
        if self.x_hi <= self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if self.y_hi <= self.y_lo:
            self.y_hi = self.y_lo + 1.0

    def px(self, x: float) -> float:
        x = math.log10(x) if self.log_x else x
        frac = (x - self.x_lo) / (self.x_hi - self.x_lo)
        return MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R)

    def py(self, y: float) -> float:
        frac = (y - self.y_lo) / (self.y_hi - self.y_lo)
        return HEIGHT - MARGIN_B - frac * (HEIGHT - MARGIN_T - MARGIN_B)


def _polyline(points: Sequence[tuple[float, float]], color: str, dash: str = "") -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline fill="none" stroke="{color}" stroke-width="1.8"'
            f'{dash_attr} points="{pts}"/>')


def _polygon(points: Sequence[tuple[float, float]], color: str) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    return f'<polygon fill="{color}" fill-opacity="0.20" stroke="none" points="{pts}"/>'


def _text(x: float, y: float, s: str, size: int = 12, anchor: str = "middle",
          rotate: Optional[float] = None) -> str:
    rot = f' transform="rotate({rotate} {x:.2f} {y:.2f})"' if rotate is not None else ""
    return (f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}"'
            f' text-anchor="{anchor}"{rot}>{s}</text>')


def render_curves_svg(
    path: Path,
    series: Sequence[CurveSeries],
    title: str,
    xlabel: str,
    ylabel: str,
    baseline: Optional[float] = None,
    baseline_label: str = "baseline",
    log_x: bool = False,
    diagonal: bool = False,
) -> None:
    """Render mean curves with sd ribbons to an SVG file."""
    xs = np.concatenate([s.x for s in series if len(s.x)]) if any(len(s.x) for s in series) \
        else np.array([0.0, 1.0])
    lo_candidates = []
    hi_candidates = []
    for s in series:
        if not len(s.x):
            continue
        sd = s.sd if s.sd is not None else np.zeros_like(s.mean)
        lo_candidates.append(float(np.min(s.mean - sd)))
        hi_candidates.append(float(np.max(s.mean + sd)))
    if baseline is not None and not math.isnan(baseline):
        lo_candidates.append(baseline)
        hi_candidates.append(baseline)
    y_lo = min(lo_candidates) if lo_candidates else 0.0
    y_hi = max(hi_candidates) if hi_candidates else 1.0
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    x_lo, x_hi = float(xs.min()), float(xs.max())
    if log_x:
        x_lo = max(x_lo, 1e-300)
        x_hi = max(x_hi, x_lo * 1.0001)
    cv = _Canvas(x_lo, x_hi, y_lo, y_hi, log_x=log_x)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        _text(WIDTH / 2, MARGIN_T - 18, title, size=15),
    ]

    # axes
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    x1, y1 = WIDTH - MARGIN_R, MARGIN_T
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    if log_x:
        lo_exp = math.floor(cv.x_lo)
        hi_exp = math.ceil(cv.x_hi)
        xticks = [10.0 ** e for e in range(int(lo_exp), int(hi_exp) + 1)
                  if cv.x_lo - 1e-9 <= e <= cv.x_hi + 1e-9]
    else:
        xticks = _ticks(cv.x_lo, cv.x_hi)
    for t in xticks:
        px = cv.px(t)
        parts.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="black"/>')
        label = f"1e{int(round(math.log10(t)))}" if log_x else _fmt_num(t)
        parts.append(_text(px, y0 + 18, label, size=11))
    for t in _ticks(y_lo, y_hi):
        py = cv.py(t)
        parts.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="black"/>')
        parts.append(_text(x0 - 8, py + 4, _fmt_num(t), size=11, anchor="end"))
    parts.append(_text((x0 + x1) / 2, HEIGHT - 14, xlabel, size=13))
    parts.append(_text(18, (y0 + y1) / 2, ylabel, size=13, rotate=-90.0))

    if diagonal:
        d_lo = max(cv.x_lo, y_lo)
        d_hi = min(cv.x_hi, y_hi)
        if d_hi > d_lo and not log_x:
            parts.append(_polyline([(cv.px(d_lo), cv.py(d_lo)), (cv.px(d_hi), cv.py(d_hi))],
                                   "#888888", dash="2,3"))

    if baseline is not None and not math.isnan(baseline):
        py = cv.py(baseline)
        parts.append(_polyline([(x0, py), (x1, py)], "#1f77b4", dash="6,4"))
        parts.append(_text(x1 - 4, py - 5, baseline_label, size=11, anchor="end"))

    legend_y = MARGIN_T + 6
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        if len(s.x):
            pts = [(cv.px(x), cv.py(y)) for x, y in zip(s.x, s.mean)]
            if s.sd is not None and len(s.x) > 1:
                upper = [(cv.px(x), cv.py(y + e)) for x, y, e in zip(s.x, s.mean, s.sd)]
                lower = [(cv.px(x), cv.py(y - e)) for x, y, e in zip(s.x, s.mean, s.sd)]
                parts.append(_polygon(upper + lower[::-1], color))
            parts.append(_polyline(pts, color))
        parts.append(f'<rect x="{x0 + 10}" y="{legend_y - 9}" width="14" height="3" fill="{color}"/>')
        parts.append(_text(x0 + 30, legend_y - 4, s.label, size=11, anchor="start"))
        legend_y += 16

    parts.append("</svg>")
    atomic_write_text(Path(path), "\n".join(parts) + "\n")


def render_scatter_svg(
    path: Path,
    x,
    y,
    title: str,
    xlabel: str,
    ylabel: str,
) -> None:
    """Plain scatter plot (used for the community cohesion figure)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0:
        x = np.array([0.0, 1.0])
        y = np.array([0.0, 1.0])
        draw = False
    else:
        draw = True
    pad_x = 0.05 * (x.max() - x.min() or 1.0)
    pad_y = 0.05 * (y.max() - y.min() or 1.0)
    cv = _Canvas(x.min() - pad_x, x.max() + pad_x, y.min() - pad_y, y.max() + pad_y)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        _text(WIDTH / 2, MARGIN_T - 18, title, size=15),
    ]
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    x1, y1 = WIDTH - MARGIN_R, MARGIN_T
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for t in _ticks(cv.x_lo, cv.x_hi):
        px = cv.px(t)
        parts.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="black"/>')
        parts.append(_text(px, y0 + 18, _fmt_num(t), size=11))
    for t in _ticks(cv.y_lo, cv.y_hi):
        py = cv.py(t)
        parts.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="black"/>')
        parts.append(_text(x0 - 8, py + 4, _fmt_num(t), size=11, anchor="end"))
    parts.append(_text((x0 + x1) / 2, HEIGHT - 14, xlabel, size=13))
    parts.append(_text(18, (y0 + y1) / 2, ylabel, size=13, rotate=-90.0))
    if draw:
        for xi, yi in zip(x, y):
            parts.append(f'<circle cx="{cv.px(xi):.2f}" cy="{cv.py(yi):.2f}" r="3.5" '
                         f'fill="#d62728" fill-opacity="0.6"/>')
    parts.append("</svg>")
    atomic_write_text(Path(path), "\n".join(parts) + "\n")
