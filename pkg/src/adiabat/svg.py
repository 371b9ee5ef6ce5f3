"""Dependency-free SVG rendering of level-curve polylines."""

from __future__ import annotations

from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 24, 24, 52


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.4g}"


def render_levels(
    levels: list[dict],
    bounds: tuple[float, float, float, float],
    xlabel: str = "x",
    ylabel: str = "y",
    title: str = "",
) -> str:
    """One ``<path>`` per nonempty level; axes and ticks are ``<line>``/``<text>``."""
    x0, x1, y0, y1 = bounds
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="16" text-anchor="middle">{escape(title)}</text>')
    bx, by = MARGIN_L, MARGIN_T + ph
    out.append(f'<line x1="{bx}" y1="{by}" x2="{bx + pw}" y2="{by}" stroke="black"/>')
    out.append(f'<line x1="{bx}" y1="{by}" x2="{bx}" y2="{MARGIN_T}" stroke="black"/>')
    for k in range(5):
        tx = x0 + (x1 - x0) * k / 4
        ty = y0 + (y1 - y0) * k / 4
        px, py = sx(tx), sy(ty)
        out.append(f'<line x1="{_fmt(px)}" y1="{by}" x2="{_fmt(px)}" y2="{by + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px)}" y="{by + 18}" text-anchor="middle">{_tick_label(tx)}</text>')
        out.append(f'<line x1="{bx - 5}" y1="{_fmt(py)}" x2="{bx}" y2="{_fmt(py)}" stroke="black"/>')
        out.append(f'<text x="{bx - 8}" y="{_fmt(py + 4)}" text-anchor="end">{_tick_label(ty)}</text>')
    out.append(f'<text x="{bx + pw / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.2f})">{escape(ylabel)}</text>'
    )
    out.append(f'<clipPath id="plot"><rect x="{bx}" y="{MARGIN_T}" width="{pw}" height="{ph}"/></clipPath>')
    k = 0
    for entry in levels:
        lines = [pl for pl in entry["polylines"] if len(pl) >= 2]
        if not lines:
            continue
        colour = PALETTE[k % len(PALETTE)]
        k += 1
        d = " ".join(
            "M " + " L ".join(f"{_fmt(sx(x))} {_fmt(sy(y))}" for x, y in pl) for pl in lines
        )
        level = entry["level"]
        out.append(
            f'<path d="{d}" fill="none" stroke="{colour}" stroke-width="1.5" '
            f'clip-path="url(#plot)" data-level="{level!r}"/>'
        )
        longest = max(lines, key=len)
        mx, my = longest[len(longest) // 2]
        out.append(
            f'<text x="{_fmt(sx(mx) + 4)}" y="{_fmt(sy(my) - 4)}" fill="{colour}">{_tick_label(level)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
