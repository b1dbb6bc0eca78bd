"""Frame and plot rendering: plain text or self-contained SVG.

ASCII frames use one character per cell ('o' moving agent, 'x'
stationary agent, '=' exit, '#' wall).  SVG output embeds everything
inline so the files open anywhere without a renderer dependency.
"""

from __future__ import annotations

import math

from .world import WorldGrid

_SVG_COLORS = {
    "wall": "#555555",
    "floor": "#f5f5f0",
    "exit": "#58b368",
    "moving": "#4878b0",
    "stationary": "#c03830",
}


def _live_agents(record) -> dict:
    """cell -> moved flag for agents still in the corridor."""
    out = {}
    for agent_id in range(record.agent_count):
        if not record.exited[agent_id]:
            pos = (int(record.xs[agent_id]), int(record.ys[agent_id]))
            out[pos] = bool(record.moved[agent_id])
    return out


def ascii_frame(record, grid: WorldGrid) -> str:
    agents = _live_agents(record)
    exit_xs = {x for x, _ in grid.exit_cells}
    lines = []
    top = "".join("=" if x in exit_xs else "#" for x in range(grid.width))
    lines.append("#" + top + "#")
    for y in range(1, grid.length):
        row = []
        for x in range(grid.width):
            if (x, y) in agents:
                row.append("o" if agents[(x, y)] else "x")
            else:
                row.append(".")
        lines.append("#" + "".join(row) + "#")
    lines.append("#" * (grid.width + 2))
    return "\n".join(lines)


def svg_frame(record, grid: WorldGrid, cell_px: int = 10) -> str:
    W, L = grid.width, grid.length
    width_px = (W + 2) * cell_px
    height_px = (L + 1) * cell_px
    c = _SVG_COLORS

    def rect(x, y, w, h, color):
        return (
            f'<rect x="{x * cell_px}" y="{y * cell_px}" width="{w * cell_px}" '
            f'height="{h * cell_px}" fill="{color}"/>'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}" '
        f'height="{height_px}" viewBox="0 0 {width_px} {height_px}">',
        rect(0, 0, W + 2, L + 1, c["floor"]),
        rect(0, 0, 1, L + 1, c["wall"]),          # left wall
        rect(W + 1, 0, 1, L + 1, c["wall"]),      # right wall
        rect(1, 0, W, 1, c["wall"]),              # exit wall
    ]
    for ex, _ in grid.exit_cells:
        parts.append(rect(ex + 1, 0, 1, 1, c["exit"]))
    for (x, y), moved in sorted(_live_agents(record).items()):
        parts.append(rect(x + 1, y, 1, 1, c["moving"] if moved else c["stationary"]))
    parts.append("</svg>")
    return "\n".join(parts)


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1.0, 2.0, 2.5, 5.0, 10.0) if raw <= m * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9:
        ticks.append(round(v, 10))
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:g}"


def svg_scatter(
    points,
    fit=None,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 480,
    height: int = 360,
) -> str:
    """Scatter plot with an optional fitted line y = slope*x + intercept.

    `fit` is anything with slope/intercept attributes, or a (slope,
    intercept) pair.
    """
    ml, mr, mt, mb = 52, 16, 30, 42
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    xpad = (xhi - xlo) * 0.08 or 1.0
    ypad = (yhi - ylo) * 0.08 or 1.0
    xlo, xhi = xlo - xpad, xhi + xpad
    ylo, yhi = ylo - ypad, yhi + ypad

    def px(x):
        return ml + (x - xlo) / (xhi - xlo) * (width - ml - mr)

    def py(y):
        return height - mb - (y - ylo) / (yhi - ylo) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{width - ml - mr}" '
        f'height="{height - mt - mb}" fill="none" stroke="#888"/>',
    ]
    for tx in _nice_ticks(xlo, xhi):
        x = px(tx)
        parts.append(
            f'<line x1="{x:.1f}" y1="{height - mb}" x2="{x:.1f}" '
            f'y2="{height - mb + 4}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{height - mb + 16}" text-anchor="middle">{_fmt(tx)}</text>'
        )
    for ty in _nice_ticks(ylo, yhi):
        y = py(ty)
        parts.append(f'<line x1="{ml - 4}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" stroke="#444"/>')
        parts.append(
            f'<text x="{ml - 7}" y="{y + 3.5:.1f}" text-anchor="end">{_fmt(ty)}</text>'
        )
    if fit is not None:
        slope = getattr(fit, "slope", None)
        intercept = getattr(fit, "intercept", None)
        if slope is None:
            slope, intercept = fit
        x1, x2 = xlo + xpad * 0.25, xhi - xpad * 0.25
        parts.append(
            f'<line x1="{px(x1):.1f}" y1="{py(slope * x1 + intercept):.1f}" '
            f'x2="{px(x2):.1f}" y2="{py(slope * x2 + intercept):.1f}" '
            f'stroke="#4878b0" stroke-width="1.5"/>'
        )
    for x, y in points:
        parts.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3.5" fill="#c03830"/>')
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="18" text-anchor="middle" font-size="13">{title}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{(ml + width - mr) / 2:.0f}" y="{height - 8}" text-anchor="middle">{xlabel}</text>'
        )
    if ylabel:
        parts.append(
            f'<text x="14" y="{(mt + height - mb) / 2:.0f}" text-anchor="middle" '
            f'transform="rotate(-90 14 {(mt + height - mb) / 2:.0f})">{ylabel}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
