"""Deterministic SVG drawings of planar subdivisions, coloured by determinant sign."""
from fractions import Fraction
from typing import Sequence, Tuple

from .plfunction import PLFunction, require_validated
from .polyhedra import HPolyhedron, polygon_vertices

COLORS = {1: "#3b6fd1", -1: "#d13b3b", 0: "#9a9a9a"}
SIZE = 400
MARGIN = 10


def _num(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def cell_polygons(f: PLFunction, box: Sequence[Tuple[Fraction, Fraction]]):
    """``(cell, det sign, bounded, vertices)`` for every cell meeting the box with positive area."""
    (x0, x1), (y0, y1) = box
    clip = HPolyhedron.box([x0, y0], [x1, y1])
    out = []
    for k, cell in enumerate(f.cells):
        verts = polygon_vertices(cell.polyhedron.intersect(clip))
        if len(verts) >= 3:
            out.append((k, f.cell_det_signs[k], f.cell_bounded[k], verts))
    return out


def render_svg(f: PLFunction, box: Sequence[Tuple[Fraction, Fraction]]) -> str:
    require_validated(f)
    if f.n != 2:
        raise ValueError(f"rendering needs a planar map, got n = {f.n}")
    (x0, x1), (y0, y1) = box
    sx = (SIZE - 2 * MARGIN) / float(x1 - x0)
    sy = (SIZE - 2 * MARGIN) / float(y1 - y0)

    def pt(v):
        return _num(MARGIN + float(v[0] - x0) * sx), _num(MARGIN + float(y1 - v[1]) * sy)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        "<defs>",
        '<pattern id="hatch" width="8" height="8" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">',
        '<line x1="0" y1="0" x2="0" y2="8" stroke="#000000" stroke-opacity="0.35" stroke-width="1.5"/>',
        "</pattern>",
        "</defs>",
    ]
    for k, sign, bounded, verts in cell_polygons(f, box):
        points = " ".join(",".join(pt(v)) for v in verts)
        lines.append(
            f'<polygon data-cell="{k}" data-sign="{sign:+d}" points="{points}" '
            f'fill="{COLORS[sign]}" fill-opacity="0.6" stroke="#000000" stroke-width="1"/>'
        )
        if not bounded:
            lines.append(f'<polygon data-cell="{k}" class="unbounded" points="{points}" fill="url(#hatch)"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
