"""Deterministic SVG arc diagrams of book embeddings.

Nodes sit on a horizontal spine in layout order and every edge is a
semicircle above the spine. Cutting the circle at ``order[0]`` preserves
conflicts, so same-style arcs never cross in a valid embedding.

Page styles: 1 red dashed, 2 blue solid, 3 green dotted. Pages 4 and up
cycle through ``PALETTE`` with a dash-dot pattern.
"""

from __future__ import annotations

from typing import Mapping
from xml.sax.saxutils import escape

from .embedding import BookEmbedding

STYLES = {
    1: ("#d62728", "6,4"),
    2: ("#1f77b4", None),
    3: ("#2ca02c", "1,4"),
}
PALETTE = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
EXTRA_DASH = "8,3,2,3"

SPACING = 40
MARGIN = 30
_ATTR = {'"': "&quot;"}


def page_style(page: int) -> tuple[str, str | None]:
    if page in STYLES:
        return STYLES[page]
    return PALETTE[(page - 4) % len(PALETTE)], EXTRA_DASH


def _num(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def render_svg(emb: BookEmbedding, labels: Mapping[int, str] | None = None) -> str:
    n = len(emb.order)
    pos = emb.layout.pos
    width = 2 * MARGIN + max(n - 1, 0) * SPACING
    top = MARGIN + (n - 1) * SPACING / 2 if n > 1 else MARGIN
    height = top + 2 * MARGIN
    spine = top
    x = lambda p: MARGIN + p * SPACING  # noqa: E731
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">',
        f'<line x1="{_num(x(0))}" y1="{_num(spine)}" x2="{_num(x(max(n - 1, 0)))}" y2="{_num(spine)}" '
        'stroke="#000000" stroke-width="1"/>',
    ]
    for (u, v), page in sorted(emb.pages.items(), key=lambda kv: (kv[1], kv[0])):
        a, b = sorted((pos[u], pos[v]))
        r = (b - a) * SPACING / 2
        color, dash = page_style(page)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        cap = ' stroke-linecap="round"' if page == 3 else ""
        out.append(
            f'<path d="M {_num(x(a))} {_num(spine)} A {_num(r)} {_num(r)} 0 0 1 {_num(x(b))} {_num(spine)}" '
            f'fill="none" stroke="{color}" stroke-width="1.5"{dash_attr}{cap} data-edge="{u}-{v}" data-page="{page}"/>'
        )
    for name, p in sorted(emb.markers.items()):
        mx = x(p) if p <= n - 1 else x(n - 1) + (p - (n - 1)) * MARGIN
        out.append(
            f'<line x1="{_num(mx)}" y1="{_num(spine - 8)}" x2="{_num(mx)}" y2="{_num(spine + 8)}" '
            f'stroke="#555555" stroke-width="1" data-marker="{escape(name, _ATTR)}"/>'
        )
        out.append(f'<text x="{_num(mx)}" y="{_num(spine + 30)}" font-size="10" text-anchor="middle">{escape(name)}</text>')
    for i, v in enumerate(emb.order):
        label = labels.get(v, str(v)) if labels else str(v)
        out.append(f'<circle cx="{_num(x(i))}" cy="{_num(spine)}" r="3" fill="#000000" data-node="{v}"/>')
        out.append(f'<text x="{_num(x(i))}" y="{_num(spine + 18)}" font-size="10" text-anchor="middle">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
