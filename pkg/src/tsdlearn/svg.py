"""Minimal SVG line charts (no plotting library needed)."""

from __future__ import annotations

from typing import Optional, Sequence
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")

W, H = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 60, 150, 30, 50


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def line_chart(series: Sequence[tuple[str, Sequence[float], Sequence[float]]], *,
               title: str, xlabel: str, ylabel: str,
               y_range: Optional[tuple[float, float]] = None,
               markers: Sequence[tuple[float, float, str]] = ()) -> str:
    """Render ``(label, xs, ys)`` series as polylines; ``markers`` are
    ``(x, y, label)`` points drawn as circles."""
    xs_all = [x for _, xs, _ in series for x in xs] or [0.0, 1.0]
    ys_all = [y for _, _, ys in series for y in ys] or [0.0, 1.0]
    x0, x1 = min(xs_all), max(xs_all)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    y0, y1 = y_range if y_range else (min(ys_all), max(ys_all))
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2:.0f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
           f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>']
    for t in _ticks(x0, x1):
        out.append(f'<text x="{_fmt(px(t))}" y="{TOP + ph + 15}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{LEFT}" x2="{LEFT + pw}" y1="{_fmt(py(t))}" y2="{_fmt(py(t))}" '
                   f'stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 5}" y="{_fmt(py(t) + 4)}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.0f}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="15" y="{TOP + ph / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {TOP + ph / 2:.0f})">{escape(ylabel)}</text>')
    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        if len(xs) <= 20:
            for x, y in zip(xs, ys):
                out.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3" fill="{color}"/>')
        ly = TOP + 14 + 16 * i
        out.append(f'<line x1="{LEFT + pw + 10}" x2="{LEFT + pw + 30}" y1="{ly}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + pw + 35}" y="{ly + 4}">{escape(label)}</text>')
    for x, y, label in markers:
        out.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="5" fill="none" '
                   f'stroke="black" stroke-width="1.5"/>')
        out.append(f'<text x="{_fmt(px(x) + 7)}" y="{_fmt(py(y) - 7)}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
