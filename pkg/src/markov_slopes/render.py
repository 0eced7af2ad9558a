"""SVG view of the stable-norm unit sphere with corner tangent stubs."""

from __future__ import annotations

import math
from fractions import Fraction
from xml.sax.saxutils import escape

from .farey import coprime_pairs
from .fock import corner_slopes
from .norm import NORM_PRECISION, sphere_point, symmetry_group

# draw lattice coordinates on the hexagonal basis e1 = (1, 0), e2 = (1/2, sqrt3/2),
# where the order-6 symmetry becomes a Euclidean rotation
_E2 = (0.5, math.sqrt(3) / 2)
STUB = 0.08
SIZE = 640


def _embed(x: float, y: float) -> tuple[float, float]:
    return (x + y * _E2[0], y * _E2[1])


def _act(g, x: float, y: float) -> tuple[float, float]:
    return (g[0] * x + g[1] * y, g[2] * x + g[3] * y)


def sector_arc(bound: int, precision_bits: int = NORM_PRECISION) -> list[tuple[int, int, float, float]]:
    """Sphere points ``(q, p, x, y)`` with ``q <= bound``, ordered by angle."""
    pts = sorted((tuple(c) for c in coprime_pairs(bound)), key=lambda pt: Fraction(pt[1], pt[0]))
    out = []
    for q, p in pts:
        sp = sphere_point((q, p), precision_bits)
        out.append((q, p, float(sp.coords[0].mid), float(sp.coords[1].mid)))
    return out


def tangent_stubs(arc, stub_bound: int, precision_bits: int = NORM_PRECISION):
    """Segments ``((x0, y0), (x1, y1))`` along each one-sided tangent at corners with ``q <= stub_bound``."""
    stubs = []
    for q, p, x, y in arc:
        if q > stub_bound:
            continue
        cs = corner_slopes((q, p), precision_bits)
        if cs.mu_minus is not None:
            mu = float(cs.mu_minus.mid)
            stubs.append(((x, y), (x + STUB, y + STUB * mu)))
        if cs.mu_plus is not None:
            mu = float(cs.mu_plus.mid)
            stubs.append(((x, y), (x - STUB, y - STUB * mu)))
    return stubs


def ball_svg(bound: int, stub_bound: int | None = None, precision_bits: int = NORM_PRECISION) -> str:
    """SVG 1.1 document: the sector arc, its twelve symmetry images and tangent stubs."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    stub_bound = min(bound, 12) if stub_bound is None else stub_bound
    arc = sector_arc(bound, precision_bits)
    stubs = tangent_stubs(arc, stub_bound, precision_bits)
    group = symmetry_group()

    half = SIZE / 2
    radius = max(math.hypot(*_embed(x, y)) for _, _, x, y in arc)
    scale = 0.45 * SIZE / radius

    def screen(x: float, y: float) -> str:
        ex, ey = _embed(x, y)
        return f"{half + scale * ex:.3f},{half - scale * ey:.3f}"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{escape(f'stable-norm unit sphere, q <= {bound}')}</title>",
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    for i, g in enumerate(group):
        pts = " ".join(screen(*_act(g, x, y)) for _, _, x, y in arc)
        colour = "black" if i == 0 else "#666666"
        lines.append(f'<polyline class="arc" points="{pts}" fill="none" stroke="{colour}" stroke-width="1"/>')
    for g in group:
        for a, b in stubs:
            lines.append(
                f'<polyline class="stub" points="{screen(*_act(g, *a))} {screen(*_act(g, *b))}" '
                'fill="none" stroke="#c03020" stroke-width="0.8"/>'
            )
    for q, p, x, y in arc:
        if q <= stub_bound:
            cx, cy = screen(x, y).split(",")
            lines.append(f'<circle cx="{cx}" cy="{cy}" r="1.6" fill="black"><title>({q},{p})</title></circle>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
