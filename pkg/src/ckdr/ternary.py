"""Deterministic ternary (barycentric) SVG rendering for 3-part reductions.

All documents are assembled from strings with fixed number formatting, so
identical inputs produce byte-identical SVG.  Element order is always:
frame, grid, boundary (optional), points, labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import DimensionMismatch, EmptyInput, WrongTargetDimension
from .predictor import FittedModel, predict_real_from_projections_many
from .simplex import validate_composition

SQRT3_2 = math.sqrt(3.0) / 2.0

#: ternary-plane vertices for z1, z2, z3
VERTICES = ((0.0, 0.0), (1.0, 0.0), (0.5, SQRT3_2))

CATEGORY_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
RAMP_LOW = (33, 102, 172)    # cool blue
RAMP_HIGH = (178, 24, 43)    # warm red
BUBBLE_COLOR = "#17becf"


@dataclass(frozen=True)
class TernaryPoint:
    """One marker: a 3-part composition plus optional class label or value."""

    composition: tuple[float, float, float]
    label: str | None = None
    value: float | None = None


@dataclass(frozen=True)
class PlotSpec:
    width: float = 500.0
    margin: float = 48.0
    vertex_labels: tuple[str, str, str] = ("z1", "z2", "z3")
    point_radius: float = 3.5
    boundary_resolution: int = 100
    grid_steps: int = 5

    @property
    def scale(self) -> float:
        return self.width - 2.0 * self.margin

    @property
    def height(self) -> float:
        return 2.0 * self.margin + self.scale * SQRT3_2


def ternary_coords(z) -> tuple[float, float]:
    """Affine map from the 2-simplex to the plane: z1 A + z2 B + z3 C."""
    z = np.asarray(z, dtype=float)
    if z.shape != (3,):
        raise DimensionMismatch("ternary coordinates need a 3-part composition")
    u = z[0] * VERTICES[0][0] + z[1] * VERTICES[1][0] + z[2] * VERTICES[2][0]
    v = z[0] * VERTICES[0][1] + z[1] * VERTICES[1][1] + z[2] * VERTICES[2][1]
    return float(u), float(v)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _pixel(spec: PlotSpec, uv: tuple[float, float]) -> tuple[float, float]:
    u, v = uv
    return spec.margin + u * spec.scale, spec.height - spec.margin - v * spec.scale


def _bary_pixel(spec: PlotSpec, z) -> tuple[float, float]:
    return _pixel(spec, ternary_coords(z))


def _svg_open(spec: PlotSpec) -> str:
    w, h = _fmt(spec.width), _fmt(spec.height)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">'
    )


def _frame(spec: PlotSpec) -> list[str]:
    corners = [_pixel(spec, v) for v in VERTICES]
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in corners)
    return [
        f'<rect width="{_fmt(spec.width)}" height="{_fmt(spec.height)}" fill="#ffffff"/>',
        f'<polygon class="frame" points="{pts}" fill="none" stroke="#333333" stroke-width="1.5"/>',
    ]


def _grid(spec: PlotSpec) -> list[str]:
    lines = []
    steps = spec.grid_steps
    for c in range(3):
        o1, o2 = (c + 1) % 3, (c + 2) % 3
        for s in range(1, steps):
            f = s / steps
            za = np.zeros(3)
            za[c], za[o1] = f, 1.0 - f
            zb = np.zeros(3)
            zb[c], zb[o2] = f, 1.0 - f
            (x1, y1), (x2, y2) = _bary_pixel(spec, za), _bary_pixel(spec, zb)
            lines.append(
                f'<line class="grid" x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
                f'stroke="#cccccc" stroke-width="0.5"/>'
            )
    return lines


def _labels(spec: PlotSpec) -> list[str]:
    (ax, ay), (bx, by), (cx, cy) = (_pixel(spec, v) for v in VERTICES)
    la, lb, lc = (escape(str(t)) for t in spec.vertex_labels)
    common = 'font-family="sans-serif" font-size="14" fill="#333333"'
    return [
        f'<text x="{_fmt(ax - 6)}" y="{_fmt(ay + 18)}" text-anchor="end" {common}>{la}</text>',
        f'<text x="{_fmt(bx + 6)}" y="{_fmt(by + 18)}" text-anchor="start" {common}>{lb}</text>',
        f'<text x="{_fmt(cx)}" y="{_fmt(cy - 10)}" text-anchor="middle" {common}>{lc}</text>',
    ]


def _ramp_color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    rgb = tuple(
        int(round(lo + t * (hi - lo))) for lo, hi in zip(RAMP_LOW, RAMP_HIGH)
    )
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _point_colors(points: list[TernaryPoint]) -> list[str]:
    labels = [p.label for p in points]
    if any(l is not None for l in labels):
        distinct = sorted({str(l) for l in labels if l is not None})
        lut = {lab: CATEGORY_COLORS[i % len(CATEGORY_COLORS)] for i, lab in enumerate(distinct)}
        return [lut.get(str(l), "#777777") if l is not None else "#777777" for l in labels]
    values = [p.value for p in points]
    if any(v is not None for v in values):
        present = [float(v) for v in values if v is not None]
        lo, hi = min(present), max(present)
        span = hi - lo
        out = []
        for v in values:
            t = 0.5 if (v is None or span == 0.0) else (float(v) - lo) / span
            out.append(_ramp_color(t))
        return out
    return ["#1f77b4"] * len(points)


def render_projection_plot(
    points: list[TernaryPoint],
    spec: PlotSpec = PlotSpec(),
    boundary_model: FittedModel | None = None,
) -> str:
    """Scatter of reduced compositions inside the reference triangle.

    Points are colored by class label when labels are present, otherwise by
    a two-color ramp over their values.  When ``boundary_model`` is given,
    its zero level set is drawn as a dashed curve beneath the points.
    """
    if len(points) == 0:
        raise EmptyInput("no points to plot")
    parts = [_svg_open(spec)]
    parts += _frame(spec)
    parts += _grid(spec)
    if boundary_model is not None:
        parts.append(_boundary_path_element(boundary_model, spec))
    colors = _point_colors(list(points))
    for p, color in zip(points, colors):
        z = validate_composition(np.asarray(p.composition, dtype=float))
        x, y = _bary_pixel(spec, z)
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(spec.point_radius)}" '
            f'fill="{color}" fill-opacity="0.75" stroke="none"/>'
        )
    parts += _labels(spec)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_allocation_plot(
    P,
    spec: PlotSpec = PlotSpec(),
    cluster_tol: float = 0.05,
) -> str:
    """Columns of a 3 x d reduction matrix inside the reference triangle.

    Each column is a point of the simplex labelled by its 1-based part
    index.  Two or more columns within ``cluster_tol`` (max-norm) of a
    common vertex are pooled into a single bubble whose radius grows like
    the square root of the count.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != 3:
        raise WrongTargetDimension("allocation plot needs a 3 x d matrix")
    d = P.shape[1]
    eye = np.eye(3)
    vertex_members: list[list[int]] = [[], [], []]
    loose: list[int] = []
    for j in range(d):
        dists = np.max(np.abs(P[:, j][:, None] - eye), axis=0)
        v = int(np.argmin(dists))
        if dists[v] <= cluster_tol:
            vertex_members[v].append(j)
        else:
            loose.append(j)

    parts = [_svg_open(spec)]
    parts += _frame(spec)
    parts += _grid(spec)
    bubble_texts = []
    for v, members in enumerate(vertex_members):
        if len(members) >= 2:
            x, y = _bary_pixel(spec, eye[v])
            r = spec.point_radius * 1.8 * math.sqrt(len(members))
            parts.append(
                f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" '
                f'fill="{BUBBLE_COLOR}" fill-opacity="0.6" stroke="#0e7a85" stroke-width="1"/>'
            )
            bubble_texts.append(
                f'<text x="{_fmt(x)}" y="{_fmt(y + 4)}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="12" fill="#1a1a1a">{len(members)}</text>'
            )
        else:
            loose.extend(members)
    point_texts = []
    for j in sorted(loose):
        x, y = _bary_pixel(spec, P[:, j])
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(spec.point_radius)}" '
            f'fill="#d62728" fill-opacity="0.8" stroke="none"/>'
        )
        point_texts.append(
            f'<text x="{_fmt(x + 5)}" y="{_fmt(y - 5)}" text-anchor="start" '
            f'font-family="sans-serif" font-size="10" fill="#333333">{j + 1}</text>'
        )
    parts += bubble_texts
    parts += point_texts
    parts += _labels(spec)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _boundary_segments(model: FittedModel, spec: PlotSpec) -> list[tuple]:
    """Zero level set of the signed prediction over the barycentric grid.

    The triangle is subdivided at the given resolution, the prediction is
    evaluated at each grid node *directly* (grid compositions are fed to
    the dual predictor as reduced points), and each sub-triangle whose
    corner signs disagree contributes one linearly interpolated segment.
    A node value of exactly zero counts as positive, matching the signed
    prediction's tie rule.
    """
    if model.m != 3:
        raise WrongTargetDimension("decision boundary needs a 3-row reduction matrix")
    R = int(spec.boundary_resolution)
    if R < 1:
        raise DimensionMismatch("boundary resolution must be >= 1")
    nodes = []
    index = {}
    for i in range(R + 1):
        for j in range(R + 1 - i):
            index[(i, j)] = len(nodes)
            nodes.append((i / R, j / R, (R - i - j) / R))
    Z = np.asarray(nodes)
    f = predict_real_from_projections_many(model, Z)

    def corner(i, j):
        return index[(i, j)]

    def cut(a_idx, b_idx):
        fa, fb = f[a_idx], f[b_idx]
        t = fa / (fa - fb)
        za, zb = Z[a_idx], Z[b_idx]
        return tuple((1.0 - t) * za + t * zb)

    segments = []
    for i in range(R):
        for j in range(R - i):
            tri_up = (corner(i, j), corner(i + 1, j), corner(i, j + 1))
            tris = [tri_up]
            if i + j <= R - 2:
                tris.append((corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1)))
            for tri in tris:
                signs = [f[t] >= 0.0 for t in tri]
                if all(signs) or not any(signs):
                    continue
                crossings = [
                    cut(tri[a], tri[b])
                    for a, b in ((0, 1), (1, 2), (2, 0))
                    if signs[a] != signs[b]
                ]
                if len(crossings) == 2:
                    segments.append((crossings[0], crossings[1]))
    return segments


def _boundary_path_element(model: FittedModel, spec: PlotSpec) -> str:
    pieces = []
    for za, zb in _boundary_segments(model, spec):
        (x1, y1), (x2, y2) = _bary_pixel(spec, za), _bary_pixel(spec, zb)
        pieces.append(f"M {_fmt(x1)} {_fmt(y1)} L {_fmt(x2)} {_fmt(y2)}")
    d_attr = " ".join(pieces)
    return (
        f'<path class="boundary" d="{d_attr}" fill="none" stroke="#1a1a1a" '
        f'stroke-width="1.5" stroke-dasharray="6,4"/>'
    )


def render_decision_boundary(model: FittedModel, spec: PlotSpec = PlotSpec()) -> str:
    """Standalone SVG document containing only the dashed zero level set."""
    parts = [_svg_open(spec), _boundary_path_element(model, spec), "</svg>"]
    return "\n".join(parts) + "\n"
