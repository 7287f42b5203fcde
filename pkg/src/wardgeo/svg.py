"""Minimal deterministic SVG line charts (no plotting dependency).

Just enough to eyeball the alpha trade-off curves: polylines, axes, ticks,
and a legend.  Output is a plain string with fixed formatting so identical
inputs yield identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["Series", "line_chart"]

_MARGIN_L = 62.0
_MARGIN_R = 18.0
_MARGIN_T = 34.0
_MARGIN_B = 46.0


@dataclass(frozen=True)
class Series:
    label: str
    y: tuple[float, ...]
    dashed: bool = False


def _f(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int) -> list[float]:
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def line_chart(x: list[float], series: list[Series], *, title: str,
               xlabel: str, ylabel: str, width: int = 640, height: int = 440,
               y_min: float = 0.0, y_max: float = 1.0) -> str:
    """Render one chart with a shared x axis; y range defaults to [0, 1]."""
    if not x or any(len(s.y) != len(x) for s in series):
        raise ValueError("series lengths must match the x vector")
    x_min, x_max = min(x), max(x)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max <= y_min:
        y_max = y_min + 1.0
    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B

    def px(v: float) -> float:
        return _MARGIN_L + (v - x_min) / (x_max - x_min) * plot_w

    def py(v: float) -> float:
        return _MARGIN_T + (y_max - v) / (y_max - y_min) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{_f(width / 2)}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    # axes
    x0, y0 = _MARGIN_L, _MARGIN_T + plot_h
    out.append(f'<line x1="{_f(x0)}" y1="{_f(_MARGIN_T)}" x2="{_f(x0)}" y2="{_f(y0)}" stroke="black"/>')
    out.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x0 + plot_w)}" y2="{_f(y0)}" stroke="black"/>')
    for tv in _ticks(x_min, x_max, 6):
        out.append(
            f'<line x1="{_f(px(tv))}" y1="{_f(y0)}" x2="{_f(px(tv))}" y2="{_f(y0 + 4)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_f(px(tv))}" y="{_f(y0 + 18)}" text-anchor="middle">{tv:.4g}</text>'
        )
    for tv in _ticks(y_min, y_max, 6):
        out.append(
            f'<line x1="{_f(x0 - 4)}" y1="{_f(py(tv))}" x2="{_f(x0)}" y2="{_f(py(tv))}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_f(x0 - 8)}" y="{_f(py(tv) + 4)}" text-anchor="end">{tv:.4g}</text>'
        )
    out.append(
        f'<text x="{_f(x0 + plot_w / 2)}" y="{_f(height - 10)}" text-anchor="middle">{xlabel}</text>'
    )
    out.append(
        f'<text x="16" y="{_f(_MARGIN_T + plot_h / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_f(_MARGIN_T + plot_h / 2)})">{ylabel}</text>'
    )
    # curves
    for s in series:
        pts = " ".join(f"{_f(px(xv))},{_f(py(yv))}" for xv, yv in zip(x, s.y))
        dash = ' stroke-dasharray="7 4"' if s.dashed else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"{dash}/>')
    # legend, top right of the plot area
    ly = _MARGIN_T + 12.0
    for s in series:
        lx = x0 + plot_w - 150.0
        dash = ' stroke-dasharray="7 4"' if s.dashed else ""
        out.append(
            f'<line x1="{_f(lx)}" y1="{_f(ly)}" x2="{_f(lx + 28)}" y2="{_f(ly)}" '
            f'stroke="black" stroke-width="1.5"{dash}/>'
        )
        out.append(f'<text x="{_f(lx + 34)}" y="{_f(ly + 4)}">{s.label}</text>')
        ly += 16.0
    out.append("</svg>")
    return "\n".join(out) + "\n"
