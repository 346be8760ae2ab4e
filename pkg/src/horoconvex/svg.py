"""Static SVG figures of disk-model scenes."""
from __future__ import annotations

import math
from typing import Optional, Sequence

from .arcs import AdmissiblePath
from .geometry import GeometryError, MoebiusMap, mobius_map_circle

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")
SIZE = 480


def _f(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _xy(z: complex) -> str:
    # screen y points down
    return f"{_f(z.real)},{_f(-z.imag)}"


def _piece_d(p) -> str:
    if p.is_segment:
        return f"L {_xy(p.end)}"
    r = _f(p.support.radius)
    large = 1 if abs(p.sweep) > math.pi else 0
    sweep = 0 if p.orientation > 0 else 1
    return f"A {r} {r} 0 {large} {sweep} {_xy(p.end)}"


def render_svg(obstacles: Sequence, path: Optional[AdmissiblePath] = None,
               covering: Sequence = (), transport: Optional[MoebiusMap] = None,
               points: Sequence[complex] = ()) -> str:
    """Unit circle, obstacle horodisks, optional covering disks and a path."""
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="-1.1 -1.1 2.2 2.2">',
        '<defs><clipPath id="unit"><circle cx="0" cy="0" r="1"/></clipPath></defs>',
        '<rect x="-1.1" y="-1.1" width="2.2" height="2.2" fill="white"/>',
        '<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.006"/>',
    ]
    for h in obstacles:
        c = h.center
        out.append(f'<circle cx="{_f(c.real)}" cy="{_f(-c.imag)}" r="{_f(h.radius)}" '
                   'fill="#bbbbbb" fill-opacity="0.6" stroke="#555555" stroke-width="0.004"/>')
    if covering and transport is not None:
        back = transport.inverse()
        for D in covering:
            try:
                img = mobius_map_circle(back, D.circle)
            except GeometryError:
                continue
            if img.is_line:
                continue
            c = img.center
            out.append(f'<circle cx="{_f(c.real)}" cy="{_f(-c.imag)}" r="{_f(img.radius)}" fill="none" '
                       'stroke="#888888" stroke-dasharray="0.02 0.015" stroke-width="0.004" '
                       'clip-path="url(#unit)"/>')
    if path is not None:
        for k, p in enumerate(path.pieces):
            color = PALETTE[k % len(PALETTE)]
            out.append(f'<path d="M {_xy(p.start)} {_piece_d(p)}" fill="none" stroke="{color}" '
                       'stroke-width="0.01"/>')
    for z in points:
        out.append(f'<circle cx="{_f(z.real)}" cy="{_f(-z.imag)}" r="0.015" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
