"""SVG phase portrait of the reduced foliation in the (r, z) chart.

Leaves are the level sets ``e^-2 z^2 = (C r^2 - 1)(r^2 - 1) + e``, i.e.
``z = +- e sqrt(g_C(r))`` with ``g_C(r) = C r^4 - (C + 1) r^2 + 1 + e``.  They
live in the projection of the quarter-sphere, ``C r^2 (r^2 - 1) <= 0``, so
``|r| <= 1`` for ``C > 0`` and ``1 <= |r| <= sqrt(1 + e)`` for ``C < 0``.  The
chart is mirrored in ``r`` (the reflection-extended surface).

All curve vertices are written in model coordinates inside one transformed
group, so they can be checked against the leaf equation straight from the
file.  Strokes use ``vector-effect: non-scaling-stroke``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import quoteattr

import numpy as np

from .construction import SpecialOrbits, admissible_interval
from .dynamics import SingularPoint
from .poly import as_scalar

MIN_LEAVES = 12


def leaf_g(C: float, r, eps: float):
    s = np.asarray(r, dtype=float) ** 2
    return C * s * s - (C + 1) * s + 1 + eps


def leaf_residual(C: float, r, z, eps: float):
    """``e^-2 z^2 - (C r^2 - 1)(r^2 - 1) - e`` (vectorised)."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    return z * z / eps**2 - (C * r * r - 1) * (r * r - 1) - eps


def _r_intervals(C: float, eps: float) -> list[tuple[float, float]]:
    """Maximal r-intervals (r >= 0) where the leaf exists."""
    if C > 0:
        lo, hi = 0.0, 1.0
    elif C < 0:
        lo, hi = 1.0, math.sqrt(1 + eps)
    else:
        lo, hi = 0.0, math.sqrt(1 + eps)
    # roots of g in s = r^2
    if C == 0:
        roots = [1 + eps]
    else:
        disc = (C + 1) ** 2 - 4 * C * (1 + eps)
        roots = []
        if disc >= 0:
            sq = math.sqrt(disc)
            roots = sorted({((C + 1) - sq) / (2 * C), ((C + 1) + sq) / (2 * C)})
    cuts = sorted({lo, hi, *(math.sqrt(s) for s in roots if s > 0 and lo < math.sqrt(s) < hi)})
    out = []
    for a, b in zip(cuts, cuts[1:]):
        if leaf_g(C, 0.5 * (a + b), eps) > 0:
            out.append((a, b))
    return out


def _samples(a: float, b: float, count: int) -> np.ndarray:
    # Chebyshev-like spacing clusters samples at the turning points
    t = np.linspace(0, math.pi, count)
    return a + (b - a) * (1 - np.cos(t)) / 2


def leaf_polylines(C: float, eps: float, samples: int = 160) -> list[np.ndarray]:
    """Polylines (arrays of (r, z)) of the leaf with parameter ``C``, both mirrors."""
    lines = []
    for a, b in _r_intervals(C, eps):
        r = _samples(a, b, samples)
        g = np.clip(leaf_g(C, r, eps), 0.0, None)
        z = eps * np.sqrt(g)
        # one closed-up strand: upper branch a->b, lower branch b->a
        rr = np.concatenate([r, r[::-1]])
        zz = np.concatenate([z, -z[::-1]])
        for sign in (1, -1):
            lines.append(np.stack([sign * rr, zz], axis=1))
    return lines


def default_leaf_values(eps, count: int = 16) -> list[float]:
    """``count`` leaf parameters spanning both sides of C_sep, plus negatives."""
    if count < MIN_LEAVES:
        raise ValueError(f"at least {MIN_LEAVES} leaves are drawn, got {count}")
    c_sep = float(SpecialOrbits.at(as_scalar(eps)).c_sep)
    k_neg = count // 4
    k_pos = count - k_neg
    below = [c_sep * math.exp(-t) for t in np.linspace(0.08, 2.5, k_pos // 2)]
    above = [c_sep * math.exp(t) for t in np.linspace(0.08, 2.5, k_pos - k_pos // 2)]
    neg = [-math.exp(t) for t in np.linspace(-2.0, 2.5, k_neg)]
    return sorted(below + above + neg)


@dataclass
class PortraitSpec:
    eps: Fraction
    leaves: list[float]
    separatrix: bool = True
    markers: Sequence[SingularPoint] = ()
    boundary: bool = True
    width: int = 900
    height: int = 600
    samples: int = 160
    c_sep: float = field(init=False)

    def __post_init__(self):
        self.eps = as_scalar(self.eps)
        self.c_sep = float(SpecialOrbits.at(self.eps).c_sep)

    @classmethod
    def default(cls, eps, markers=(), leaves: int = 16, **kw) -> "PortraitSpec":
        return cls(as_scalar(eps), default_leaf_values(eps, leaves), markers=markers, **kw)


def _fmt(x: float) -> str:
    return repr(float(x))


def _points_attr(line: np.ndarray) -> str:
    return " ".join(f"{_fmt(r)},{_fmt(z)}" for r, z in line)


def render_svg(spec: PortraitSpec) -> str:
    eps = float(spec.eps)
    W, H = spec.width, spec.height
    inset_w = W * 0.28
    main_w = W - inset_w - 40
    rmax = math.sqrt(1 + eps) * 1.04
    zmax = eps * math.sqrt(1 + eps) * 1.15
    sx = main_w / (2 * rmax)
    sz = (H - 60) / (2 * zmax)
    tx, ty = 20 + main_w / 2, H / 2

    def px(r, z):
        return tx + sx * r, ty - sz * z

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        "<style>polyline,line{fill:none;vector-effect:non-scaling-stroke}"
        ".leaf{stroke:#4a6fa5;stroke-width:1}.separatrix{stroke:#c0392b;stroke-width:2.5}"
        ".outline{stroke:#222;stroke-width:1.5}.boundary{stroke:#2a9d2a;stroke-width:1.5;stroke-dasharray:6 4}"
        ".axis{stroke:#999;stroke-width:0.5}.singular-marker{stroke:#000;stroke-width:1}"
        ".inset-trace{stroke:#222;stroke-width:1.2}.inset-point{fill:#c0392b}</style>",
        f'<title>Characteristic foliation, eps = {spec.eps}</title>',
        f'<g id="chart" data-chart="r,z" data-eps="{spec.eps}" '
        f'transform="matrix({_fmt(sx)} 0 0 {_fmt(-sz)} {_fmt(tx)} {_fmt(ty)})">',
        f'<line class="axis" x1="{_fmt(-rmax)}" y1="0" x2="{_fmt(rmax)}" y2="0"/>',
        f'<line class="axis" x1="0" y1="{_fmt(-zmax)}" x2="0" y2="{_fmt(zmax)}"/>',
    ]
    # outline: rho = 0, i.e. the C = 0 level set r^2 + e^-2 z^2 = 1 + e
    for line in leaf_polylines(0.0, eps, spec.samples):
        out.append(f'<polyline class="outline" data-C="0" points="{_points_attr(line)}"/>')
    for C in spec.leaves:
        pts = " ".join(f'<polyline points="{_points_attr(l)}"/>' for l in leaf_polylines(C, eps, spec.samples))
        out.append(f'<g class="leaf" data-C="{_fmt(C)}">{pts}</g>')
    if spec.separatrix:
        pts = " ".join(f'<polyline points="{_points_attr(l)}"/>'
                       for l in leaf_polylines(spec.c_sep, eps, spec.samples * 2))
        out.append(f'<g class="separatrix" data-C="{_fmt(spec.c_sep)}">{pts}</g>')
    if spec.boundary:
        lo, hi, _ = admissible_interval(spec.eps)
        r = np.linspace(float(lo), float(hi), 50)
        line = np.stack([r, r - 1], axis=1)
        out.append(f'<polyline class="boundary" data-curve="z=r-1" points="{_points_attr(line)}"/>')
    out.append("</g>")

    for sp in spec.markers:
        z, r, rho = sp.as_floats()
        cx, cy = px(r, z)
        fill = {"source": "#f4a261", "sink": "#2a9d8f", "saddle": "#e63946"}.get(sp.kind or "", "#888")
        attrs = (f'class="singular-marker" cx="{cx:.3f}" cy="{cy:.3f}" r="5" fill="{fill}" '
                 f'data-z="{_fmt(z)}" data-r="{_fmt(r)}" data-rho="{_fmt(rho)}" '
                 f'data-kind={quoteattr(str(sp.kind))} data-index="{sp.index}" data-label={quoteattr(sp.label)}')
        out.append(f"<circle {attrs}/>")

    # inset: (r, rho) trace of the quarter-sphere at z = 0
    ix0, iy0 = W - inset_w - 10, 30
    iw, ih = inset_w, inset_w * 0.7
    rr = math.sqrt(1 + eps)
    isx, isy = iw / (rr * 1.1), ih / (eps * rr * 1.2)
    out.append(f'<g id="inset" data-chart="r,rho" data-z="0" '
               f'transform="matrix({_fmt(isx)} 0 0 {_fmt(-isy)} {_fmt(ix0)} {_fmt(iy0 + ih)})">')
    t = np.linspace(0, rr, 120)
    trace = np.stack([t, eps * np.sqrt(np.clip(1 + eps - t * t, 0, None))], axis=1)
    out.append(f'<polyline class="inset-trace" points="{_points_attr(trace)}"/>')
    out.append("</g>")
    orb = SpecialOrbits.at(spec.eps)
    hx, hy = ix0 + isx * float(orb.r0), iy0 + ih - isy * float(orb.n0)
    out.append(f'<circle class="inset-point" cx="{hx:.3f}" cy="{hy:.3f}" r="3" '
               f'data-r="{_fmt(orb.r0)}" data-rho="{_fmt(orb.n0)}"/>')
    out.append(f'<text x="{ix0:.1f}" y="{iy0 - 8:.1f}" font-size="12">z = 0: (r, rho)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def max_leaf_residual(svg_text: str, eps) -> float:
    """Largest leaf-equation residual over every vertex of every C-tagged curve."""
    import xml.etree.ElementTree as ET

    eps = float(as_scalar(eps))
    root = ET.fromstring(svg_text)
    worst = 0.0
    for el in root.iter():
        C = el.get("data-C")
        if C is None:
            continue
        polys = [el] if el.tag.endswith("polyline") else [p for p in el if p.tag.endswith("polyline")]
        for p in polys:
            pts = np.array([[float(v) for v in pair.split(",")] for pair in p.get("points").split()])
            res = leaf_residual(float(C), pts[:, 0], pts[:, 1], eps)
            worst = max(worst, float(np.max(np.abs(res))))
    return worst
