"""Deterministic SVG report figures.

Everything here is a pure function of its inputs: fixed-precision number
formatting, no timestamps, no randomness, so identical inputs yield
byte-identical documents suitable for golden-file testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

from .subsets import SearchResult, VariantResiduals


def _fmt(x: float) -> str:
    return f"{x:.2f}"


@dataclass(frozen=True)
class _Frame:
    x0: float
    y0: float
    width: float
    height: float
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def px(self, x: float) -> float:
        span = self.xmax - self.xmin
        rel = 0.5 if span == 0 else (x - self.xmin) / span
        return self.x0 + rel * self.width

    def py(self, y: float) -> float:
        span = self.ymax - self.ymin
        rel = 0.5 if span == 0 else (y - self.ymin) / span
        return self.y0 + self.height - rel * self.height


def _frame_for(
    xs: Sequence[float], ys: Sequence[float], x0, y0, width, height
) -> _Frame:
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    xpad = (xmax - xmin) * 0.08 or max(abs(xmin), 1.0) * 0.05
    ypad = (ymax - ymin) * 0.08 or max(abs(ymin), 1.0) * 0.05
    return _Frame(x0, y0, width, height, xmin - xpad, xmax + xpad, ymin - ypad, ymax + ypad)


def _scatter_body(
    frame: _Frame,
    points: Sequence[tuple[float, float, str]],
    line: tuple[float, float] | None,
) -> list[str]:
    parts = [
        f'<rect x="{_fmt(frame.x0)}" y="{_fmt(frame.y0)}" '
        f'width="{_fmt(frame.width)}" height="{_fmt(frame.height)}" '
        'fill="none" stroke="#444444" stroke-width="1"/>'
    ]
    if line is not None and len(points) > 1:
        slope, intercept = line
        xa, xb = frame.xmin, frame.xmax
        parts.append(
            f'<path d="M {_fmt(frame.px(xa))} {_fmt(frame.py(intercept + slope * xa))} '
            f'L {_fmt(frame.px(xb))} {_fmt(frame.py(intercept + slope * xb))}" '
            'stroke="#555555" stroke-width="1" stroke-dasharray="4,3" fill="none"/>'
        )
    for x, y, label in points:
        cx, cy = frame.px(x), frame.py(y)
        parts.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="3" fill="#1f5fa8"/>'
        )
        parts.append(
            f'<text x="{_fmt(cx + 5)}" y="{_fmt(cy - 5)}" font-size="9" '
            f'font-family="sans-serif" fill="#222222">{escape(label)}</text>'
        )
    return parts


def emit_scatter(
    points: Sequence[tuple[float, float, str]],
    line: tuple[float, float] | None = None,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    width: int = 420,
    height: int = 300,
) -> str:
    """A labeled scatter with an optional dashed least-squares line.

    points are (x, y, label) triples; labels are typically variant ranks,
    "1" for the smallest model. A single point yields no regression path.
    """
    if not points:
        raise ValueError("need at least 1 point")
    margin_l, margin_r, margin_t, margin_b = 52, 14, 28, 40
    frame = _frame_for(
        [p[0] for p in points],
        [p[1] for p in points],
        margin_l,
        margin_t,
        width - margin_l - margin_r,
        height - margin_t - margin_b,
    )
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(width / 2)}" y="18" font-size="12" text-anchor="middle" '
            f'font-family="sans-serif" fill="#000000">{escape(title)}</text>'
        )
    parts.extend(_scatter_body(frame, points, line))
    # axis extremes as tick labels
    parts.append(
        f'<text x="{_fmt(frame.x0)}" y="{_fmt(frame.y0 + frame.height + 14)}" '
        f'font-size="9" font-family="sans-serif" fill="#333333">{_fmt(frame.xmin)}</text>'
    )
    parts.append(
        f'<text x="{_fmt(frame.x0 + frame.width)}" y="{_fmt(frame.y0 + frame.height + 14)}" '
        f'font-size="9" font-family="sans-serif" text-anchor="end" fill="#333333">{_fmt(frame.xmax)}</text>'
    )
    parts.append(
        f'<text x="{_fmt(frame.x0 - 6)}" y="{_fmt(frame.y0 + frame.height)}" '
        f'font-size="9" font-family="sans-serif" text-anchor="end" fill="#333333">{_fmt(frame.ymin)}</text>'
    )
    parts.append(
        f'<text x="{_fmt(frame.x0 - 6)}" y="{_fmt(frame.y0 + 8)}" '
        f'font-size="9" font-family="sans-serif" text-anchor="end" fill="#333333">{_fmt(frame.ymax)}</text>'
    )
    if x_label:
        parts.append(
            f'<text x="{_fmt(frame.x0 + frame.width / 2)}" y="{_fmt(height - 8)}" '
            f'font-size="10" text-anchor="middle" font-family="sans-serif" '
            f'fill="#000000">{escape(x_label)}</text>'
        )
    if y_label:
        cx = 14.0
        cy = frame.y0 + frame.height / 2
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-size="10" text-anchor="middle" '
            f'font-family="sans-serif" fill="#000000" '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{escape(y_label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _bar_panel(
    x0: float,
    y0: float,
    width: float,
    height: float,
    values: Sequence[float],
    color: str,
    caption: str,
) -> list[str]:
    parts = [
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" fill="none" stroke="#444444" stroke-width="1"/>'
    ]
    finite = [v for v in values if not math.isnan(v)]
    vmax = max(finite) if finite else 0.0
    n = len(values)
    slot = width / max(n, 1)
    for i, v in enumerate(values):
        if math.isnan(v) or vmax <= 0:
            continue
        h = height * (v / vmax)
        parts.append(
            f'<rect x="{_fmt(x0 + i * slot + slot * 0.15)}" '
            f'y="{_fmt(y0 + height - h)}" width="{_fmt(slot * 0.7)}" '
            f'height="{_fmt(h)}" fill="{color}"/>'
        )
    parts.append(
        f'<text x="{_fmt(x0 + width / 2)}" y="{_fmt(y0 + height + 11)}" '
        f'font-size="8" text-anchor="middle" font-family="sans-serif" '
        f'fill="#333333">{escape(caption)}</text>'
    )
    return parts


def emit_subset_panels(
    result: SearchResult,
    variants: Sequence[VariantResiduals],
    title: str = "",
    panel_width: int = 190,
) -> str:
    """Small multiples over selected subsets: per-subset scatter of MSE vs
    log perplexity with its fit line, plus under/over SSE bars per variant
    (variants ordered as given, labeled by rank)."""
    reports = result.reports
    if not reports:
        raise ValueError("no subset reports to plot")
    pw, scatter_h, bar_h = panel_width, 150, 70
    gap, top, left = 16, 34, 16
    width = left * 2 + len(reports) * pw + (len(reports) - 1) * gap
    height = top + scatter_h + 26 + (bar_h + 26) * 2 + 16
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(width / 2)}" y="16" font-size="12" text-anchor="middle" '
            f'font-family="sans-serif" fill="#000000">{escape(title)}</text>'
        )
    for col, report in enumerate(reports):
        x0 = left + col * (pw + gap)
        pts = [
            (v.ln_perplexity, report.per_variant[v.name].mse, str(i + 1))
            for i, v in enumerate(variants)
        ]
        frame = _frame_for(
            [p[0] for p in pts], [p[1] for p in pts], x0, top, pw, scatter_h
        )
        parts.append(
            f'<text x="{_fmt(x0 + pw / 2)}" y="{_fmt(top - 5)}" font-size="9" '
            f'text-anchor="middle" font-family="sans-serif" fill="#000000">'
            f"{escape(f'{report.iteration}. {report.subset.name}')}</text>"
        )
        parts.extend(
            _scatter_body(
                frame, pts, (report.slope_fit.slope, report.slope_fit.intercept)
            )
        )
        y_bar = top + scatter_h + 26
        parts.extend(
            _bar_panel(
                x0,
                y_bar,
                pw,
                bar_h,
                [report.per_variant[v.name].sse_under for v in variants],
                "#b04a4a",
                "SSE underpredicted",
            )
        )
        parts.extend(
            _bar_panel(
                x0,
                y_bar + bar_h + 26,
                pw,
                bar_h,
                [report.per_variant[v.name].sse_over for v in variants],
                "#4a6ab0",
                "SSE overpredicted",
            )
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
