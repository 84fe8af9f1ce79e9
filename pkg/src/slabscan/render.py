"""SVG 1.1 drawings of a plan document.

Output is deterministic: elements are emitted in sorted order and every
coordinate is printed with six decimals.
"""

from __future__ import annotations

import math

from .documents import document_discs, document_scan_points
from .slabs import build_slab
from .visibility import DEFAULT_RESOLUTION, arcsets

LAYERS = ("mesh", "slabs", "regions", "points", "arcs")

# widths in output pixels; scaled to user units per drawing
_STYLE = (
    ".disc{{fill:#d8c3a5;stroke:#5a4632;stroke-width:{1}}}\n"
    ".edge{{stroke:#4a6fa5;stroke-width:{1}}}\n"
    ".slab{{stroke:#9a9a9a;stroke-width:{0};stroke-dasharray:{4} {3}}}\n"
    ".region{{fill:#7fb77e;fill-opacity:0.35;stroke:#2e7d32;stroke-width:{1}}}\n"
    ".point{{stroke:#c62828;stroke-width:{2};fill:none}}\n"
    ".arc{{stroke:#f9a825;stroke-width:{3};fill:none}}"
)


def _style(px: float) -> str:
    return _STYLE.format(*(_f(k * px) for k in (0.5, 1, 2, 3, 4)))


def _f(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _xy(p) -> str:
    # SVG y grows downward
    return f"{_f(p[0])},{_f(-p[1])}"


def _bounds(doc, discs):
    xs, ys = [], []
    for d in discs:
        xs += [d.center.x - d.radius, d.center.x + d.radius]
        ys += [d.center.y - d.radius, d.center.y + d.radius]
    for g in doc["plan"]["groups"]:
        xs.append(g["scan_point"][0])
        ys.append(g["scan_point"][1])
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    pad = 0.1 * max(x1 - x0, y1 - y0, 1e-3)
    return x0 - pad, y0 - pad, x1 + pad, y1 + pad


def _slab_segment(hp, box):
    x0, y0, x1, y1 = box
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    half = math.hypot(x1 - x0, y1 - y0)
    nx, ny = hp.normal
    s = hp.offset - (nx * cx + ny * cy)
    fx, fy = cx + s * nx, cy + s * ny
    return (fx - ny * half, fy + nx * half), (fx + ny * half, fy - nx * half)


def _arc_path(d, iv) -> str:
    c, r = d.center, d.radius
    a, b = iv.start, iv.start + iv.measure
    if iv.measure >= 2 * math.pi - 1e-12:
        # full circle as two half arcs
        p = (c.x + r, c.y)
        q = (c.x - r, c.y)
        return f"M{_xy(p)}A{_f(r)},{_f(r)} 0 1 0 {_xy(q)}A{_f(r)},{_f(r)} 0 1 0 {_xy(p)}"
    p = (c.x + r * math.cos(a), c.y + r * math.sin(a))
    q = (c.x + r * math.cos(b), c.y + r * math.sin(b))
    large = 1 if iv.measure > math.pi else 0
    # counter-clockwise in math coordinates is sweep-flag 0 after the y flip
    return f"M{_xy(p)}A{_f(r)},{_f(r)} 0 {large} 0 {_xy(q)}"


def render_svg(doc: dict, layers=LAYERS, resolution: float | None = None) -> str:
    """Draw the document. Discs are always drawn; ``layers`` picks the rest."""
    layers = set(layers)
    unknown = layers - set(LAYERS)
    if unknown:
        raise ValueError(f"unknown layers: {', '.join(sorted(unknown))}")
    discs = document_discs(doc)
    x0, y0, x1, y1 = _bounds(doc, discs)
    w, h = x1 - x0, y1 - y0
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_f(x0)} {_f(-y1)} {_f(w)} {_f(h)}" width="{_f(800.0)}" height="{_f(800.0 * h / w)}">',
        f"<style>\n{_style(w / 800.0)}\n</style>",
    ]

    if "regions" in layers:
        out.append('<g id="regions">')
        for reg in doc["regions"]:
            pts = " ".join(_xy(p) for p in reg["polygon"])
            out.append(f'<polygon class="region" data-triangle="{reg["triangle"]}" points="{pts}"/>')
        out.append("</g>")

    if "slabs" in layers:
        out.append('<g id="slabs">')
        pairs = sorted({(min(a, b), max(a, b)) for t in doc["mesh"]["triangles"]
                        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))})
        for a, b in pairs:
            slab = build_slab(discs[a], discs[b], a, b)
            for hp in slab.halfplanes:
                p, q = _slab_segment(hp, (x0, y0, x1, y1))
                out.append(f'<line class="slab" data-pair="{a}-{b}" x1="{_f(p[0])}" y1="{_f(-p[1])}" '
                           f'x2="{_f(q[0])}" y2="{_f(-q[1])}"/>')
        out.append("</g>")

    if "mesh" in layers:
        out.append('<g id="mesh">')
        edges = sorted({(min(a, b), max(a, b)) for t in doc["mesh"]["triangles"]
                        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))})
        for a, b in edges:
            p, q = discs[a].center, discs[b].center
            out.append(f'<line class="edge" x1="{_f(p.x)}" y1="{_f(-p.y)}" x2="{_f(q.x)}" y2="{_f(-q.y)}"/>')
        out.append("</g>")

    out.append('<g id="discs">')
    for k, d in enumerate(discs):
        out.append(f'<circle class="disc" data-disc="{k}" cx="{_f(d.center.x)}" cy="{_f(-d.center.y)}" r="{_f(d.radius)}"/>')
    out.append("</g>")

    points = document_scan_points(doc)
    if "arcs" in layers and points:
        if resolution is None:
            resolution = math.radians(doc["metadata"].get("resolution_deg", math.degrees(DEFAULT_RESOLUTION)))
        out.append('<g id="arcs">')
        for s in arcsets(points, discs, resolution):
            for iv in s.intervals:
                out.append(f'<path class="arc" data-disc="{s.disc_id}" d="{_arc_path(discs[s.disc_id], iv)}"/>')
        out.append("</g>")

    if "points" in layers:
        out.append('<g id="points">')
        size = 0.02 * max(w, h)
        for k, p in enumerate(points):
            out.append(
                f'<path class="point" data-group="{k}" d="M{_xy((p.x - size, p.y))}L{_xy((p.x + size, p.y))}'
                f'M{_xy((p.x, p.y - size))}L{_xy((p.x, p.y + size))}"/>'
            )
        out.append("</g>")

    out.append("</svg>")
    return "\n".join(out) + "\n"
