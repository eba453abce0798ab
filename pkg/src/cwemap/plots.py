"""Static SVG bar charts for metric reports.

Hand-rolled SVG so output bytes are deterministic for identical inputs
(replayability covers plots too).
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

_W, _H = 640, 360
_MARGIN_L, _MARGIN_B, _MARGIN_T = 60, 60, 40


def bar_chart_svg(title: str, labels: Sequence[str], values: Sequence[float],
                  y_max: float | None = None) -> str:
    if len(labels) != len(values):
        raise ValueError("labels and values must align")
    n = max(len(values), 1)
    top = y_max if y_max is not None else max(list(values) + [1e-9])
    plot_w = _W - _MARGIN_L - 20
    plot_h = _H - _MARGIN_T - _MARGIN_B
    slot = plot_w / n
    bar_w = slot * 0.6

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif">',
        f'<text x="{_W / 2:.1f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_H - _MARGIN_B}" stroke="#333"/>',
        f'<line x1="{_MARGIN_L}" y1="{_H - _MARGIN_B}" x2="{_W - 20}" '
        f'y2="{_H - _MARGIN_B}" stroke="#333"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = _H - _MARGIN_B - frac * plot_h
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-size="11">{frac * top:.3f}</text>')
        if frac > 0:
            parts.append(
                f'<line x1="{_MARGIN_L}" y1="{y:.1f}" x2="{_W - 20}" y2="{y:.1f}" '
                f'stroke="#ddd"/>')
    for i, (label, value) in enumerate(zip(labels, values)):
        h = 0.0 if top <= 0 else max(0.0, min(value / top, 1.0)) * plot_h
        x = _MARGIN_L + i * slot + (slot - bar_w) / 2
        y = _H - _MARGIN_B - h
        parts.append(
            f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" height="{h:.1f}" '
            f'fill="#4878a8"/>')
        parts.append(
            f'<text x="{x + bar_w / 2:.1f}" y="{y - 4:.1f}" text-anchor="middle" '
            f'font-size="11">{value:.4f}</text>')
        parts.append(
            f'<text x="{x + bar_w / 2:.1f}" y="{_H - _MARGIN_B + 16}" '
            f'text-anchor="middle" font-size="12">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_bar_chart(path: str | Path, title: str, labels: Sequence[str],
                    values: Sequence[float], y_max: float | None = None) -> None:
    Path(path).write_text(bar_chart_svg(title, labels, values, y_max), encoding="utf-8")
