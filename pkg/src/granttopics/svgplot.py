"""Dependency-free SVG scatter plot of a 2-D projection."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .cluster import ClusterModel
from .project import Projection2D

WIDTH = 900
HEIGHT = 700
MARGIN = 40


def _palette_color(label: int, k: int) -> str:
    hue = int(360 * label / max(k, 1))
    return f"hsl({hue},70%,45%)"


def emit_scatter_svg(
    projection: Projection2D,
    model: ClusterModel,
    names: dict[int, str] | None = None,
) -> str:
    """One circle per document colored by cluster, plus labeled centroids.

    Missing names fall back to the cluster number. Output is deterministic
    and well-formed XML.
    """
    names = names or {}
    pts = np.asarray(projection.points, dtype=np.float64)
    if pts.shape[0] != len(model.assignments):
        raise ValueError("projection rows must align with model assignments")
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)

    def place(p: np.ndarray) -> tuple[float, float]:
        sx = MARGIN + (p[0] - lo[0]) / span[0] * (WIDTH - 2 * MARGIN)
        sy = HEIGHT - MARGIN - (p[1] - lo[1]) / span[1] * (HEIGHT - 2 * MARGIN)
        return round(float(sx), 2), round(float(sy), 2)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    for p, label in zip(pts, model.assignments):
        x, y = place(p)
        parts.append(
            f'<circle class="doc" cx="{x}" cy="{y}" r="2.5" '
            f'fill="{_palette_color(int(label), model.k)}" fill-opacity="0.6"/>'
        )
    for label in range(model.k):
        centroid = pts[model.assignments == label].mean(axis=0)
        x, y = place(centroid)
        text = escape(names.get(label, str(label)))
        parts.append(
            f'<g class="centroid"><circle cx="{x}" cy="{y}" r="5" fill="black"/>'
            f'<text x="{x + 7}" y="{y + 4}" font-size="12" font-family="sans-serif">'
            f"{text}</text></g>"
        )
    parts.append("</svg>")
    return "\n".join(parts)
