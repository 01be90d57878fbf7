"""Minimal SVG emitters for the lab outputs (no plotting dependency)."""

from __future__ import annotations

from typing import Sequence

_PALETTE = ("#2c7fb8", "#e6550d", "#31a354", "#756bb1", "#636363", "#fdae6b")


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def ribbon_chart(
    bounds: Sequence[Sequence[float]],
    title: str = "",
    width: int = 480,
    height: int = 260,
    y_range: tuple[float, float] = (0.0, 100.0),
) -> str:
    """Vertical interval per step (the per-step state-of-charge ribbon)."""
    margin = 40
    lo_y, hi_y = y_range
    n = max(1, len(bounds))
    span = hi_y - lo_y or 1.0

    def ypix(v: float) -> float:
        return height - margin - (v - lo_y) / span * (height - 2 * margin)

    body = [f'<text x="{margin}" y="18" font-size="13">{title}</text>'] if title else []
    body.append(
        f'<line x1="{margin}" y1="{ypix(lo_y)}" x2="{width - margin}" y2="{ypix(lo_y)}" stroke="#999"/>'
    )
    step_w = (width - 2 * margin) / n
    for i, (lo, hi) in enumerate(bounds):
        x = margin + step_w * (i + 0.5)
        body.append(
            f'<line x1="{x:.1f}" y1="{ypix(lo):.1f}" x2="{x:.1f}" y2="{ypix(hi):.1f}" '
            f'stroke="{_PALETTE[0]}" stroke-width="10" stroke-linecap="round" opacity="0.8"/>'
        )
        body.append(f'<text x="{x - 8:.1f}" y="{height - 12}" font-size="11">{i + 1}</text>')
    return _svg(width, height, body)


def scatter_chart(
    series: Sequence[tuple[str, Sequence[tuple[float, float]]]],
    x_label: str = "",
    y_label: str = "",
    width: int = 520,
    height: int = 340,
) -> str:
    """Labeled scatter series with auto-scaled axes."""
    margin = 48
    pts = [p for _, data in series for p in data]
    if not pts:
        return _svg(width, height, ['<text x="20" y="20" font-size="12">no data</text>'])
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    xspan = (x1 - x0) or 1.0
    yspan = (y1 - y0) or 1.0

    def xpix(v):
        return margin + (v - x0) / xspan * (width - 2 * margin)

    def ypix(v):
        return height - margin - (v - y0) / yspan * (height - 2 * margin)

    body = [
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="#333"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="#333"/>',
        f'<text x="{width // 2}" y="{height - 8}" font-size="12">{x_label}</text>',
        f'<text x="12" y="{height // 2}" font-size="12" transform="rotate(-90 12 {height // 2})">{y_label}</text>',
    ]
    for idx, (label, data) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        for x, y in data:
            body.append(f'<circle cx="{xpix(x):.1f}" cy="{ypix(y):.1f}" r="3.2" fill="{color}" opacity="0.75"/>')
        body.append(
            f'<text x="{width - margin - 90}" y="{margin + 16 * idx}" font-size="12" fill="{color}">{label}</text>'
        )
    return _svg(width, height, body)
