"""Text and SVG drawings of diagrams: a dot per cell, cliques joined by edges."""
from __future__ import annotations

from boundkey.dist import Diagram

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)
CELL = 60
MARGIN = 40


def render_ascii(diagram: Diagram) -> str:
    lab = diagram.labels()
    width = max(2, len(str(max(diagram.d_E - 1, 0))) + 1)
    head = "   " + "".join(f"b{b}".rjust(width + 1) for b in range(diagram.d_B))
    lines = [head]
    for a in range(diagram.d_A):
        cells = "".join(("." if lab[a, b] < 0 else str(lab[a, b])).rjust(width + 1) for b in range(diagram.d_B))
        lines.append(f"a{a} " + cells)
    lines.append("")
    lines.append(f"d_E = {diagram.d_E}")
    for e, clique in enumerate(diagram.cliques):
        lines.append(f"  e={e}: " + " ".join(f"({a},{b})" for a, b in clique))
    crosses = diagram.crosses()
    lines.append(f"crosses: {len(crosses)}")
    for (a, a2), (b, b2) in crosses:
        lines.append(f"  rows {a},{a2} x cols {b},{b2}")
    return "\n".join(lines) + "\n"


def _xy(a: int, b: int) -> tuple[int, int]:
    # Bob along x, Alice along y
    return MARGIN + b * CELL, MARGIN + a * CELL


def render_svg(diagram: Diagram) -> str:
    """Deterministic SVG: one <g> per clique holding its edges and dots."""
    w = 2 * MARGIN + (diagram.d_B - 1) * CELL
    h = 2 * MARGIN + (diagram.d_A - 1) * CELL
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        '<g class="grid" stroke="#dddddd" stroke-width="1">',
    ]
    for a in range(diagram.d_A):
        x0, y = _xy(a, 0)
        x1, _ = _xy(a, diagram.d_B - 1)
        out.append(f'<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}"/>')
    for b in range(diagram.d_B):
        x, y0 = _xy(0, b)
        _, y1 = _xy(diagram.d_A - 1, b)
        out.append(f'<line x1="{x}" y1="{y0}" x2="{x}" y2="{y1}"/>')
    out.append("</g>")
    for e, clique in enumerate(diagram.cliques):
        color = PALETTE[e % len(PALETTE)]
        out.append(f'<g class="clique" data-eve="{e}" stroke="{color}" fill="{color}">')
        for i, (a, b) in enumerate(clique):
            for a2, b2 in clique[i + 1:]:
                x1, y1 = _xy(a, b)
                x2, y2 = _xy(a2, b2)
                out.append(f'<line class="edge" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke-width="3"/>')
        for a, b in clique:
            x, y = _xy(a, b)
            out.append(f'<circle class="dot" cx="{x}" cy="{y}" r="7"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_diagram(diagram: Diagram, format: str = "ascii") -> str:
    if format == "ascii":
        return render_ascii(diagram)
    if format == "svg":
        return render_svg(diagram)
    raise ValueError(f"format must be 'ascii' or 'svg', got {format!r}")
