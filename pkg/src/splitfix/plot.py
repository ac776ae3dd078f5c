"""Static SVG rendering of a planar trace."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .geometry import Ball, Box, Halfspace, Line

SIZE = 800
PAD = 0.10


class _Frame:
    """World-to-screen map with a common scale on both axes (circles stay round)."""

    def __init__(self, pts: np.ndarray):
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = float(np.max(hi - lo))
        if span == 0.0:
            span = 1.0
        span *= 1.0 + 2 * PAD
        mid = (lo + hi) / 2.0
        self.x0 = mid[0] - span / 2.0
        self.y0 = mid[1] - span / 2.0
        self.span = span
        self.scale = SIZE / span

    def __call__(self, p) -> tuple[float, float]:
        return (p[0] - self.x0) * self.scale, SIZE - (p[1] - self.y0) * self.scale

    def world_bounds(self):
        return self.x0, self.x0 + self.span, self.y0, self.y0 + self.span


def _f(v: float) -> str:
    return f"{v:.3f}"


def _set_element(s, frame: _Frame) -> str | None:
    xmin, xmax, ymin, ymax = frame.world_bounds()
    if isinstance(s, Ball):
        cx, cy = frame(s.center)
        return (
            f'<circle class="set ball" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(s.radius * frame.scale)}" '
            'fill="none" stroke="#555" stroke-width="1.5"/>'
        )
    if isinstance(s, Box):
        lo = np.maximum(s.lo, [xmin, ymin])
        hi = np.minimum(s.hi, [xmax, ymax])
        x1, y1 = frame((lo[0], hi[1]))
        x2, y2 = frame((hi[0], lo[1]))
        return (
            f'<rect class="set box" x="{_f(x1)}" y="{_f(y1)}" width="{_f(max(x2 - x1, 0.0))}" '
            f'height="{_f(max(y2 - y1, 0.0))}" fill="none" stroke="#555" stroke-width="1.5"/>'
        )
    if isinstance(s, (Line, Halfspace)):
        d = s.direction if isinstance(s, Line) else np.array([-s.normal[1], s.normal[0]])
        reach = 2.0 * frame.span + np.hypot(xmin, ymin) + np.hypot(xmax, ymax)
        (x1, y1), (x2, y2) = frame(-reach * d), frame(reach * d)
        kind = "line" if isinstance(s, Line) else "halfspace"
        return (
            f'<line class="set {kind}" x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            'stroke="#555" stroke-width="1.5"/>'
        )
    return None


def render_svg(trace, xbar=None, sets=(), max_points: int | None = 40) -> str:
    """SVG text for the first ``max_points`` governing and shadow iterates."""
    if trace.dim != 2:
        raise ValueError(f"plots are 2-D only, trace has dimension {trace.dim}")
    k = len(trace) if max_points is None else min(len(trace), max_points)
    gov = trace.governing[:k]
    sha = trace.shadow[:k]
    pts = np.vstack([gov, sha] + ([np.asarray(xbar, float)[None, :]] if xbar is not None else []))
    frame = _Frame(pts)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    for s in sets:
        el = _set_element(s, frame)
        if el:
            out.append(el)
    for name, series, colour in (("governing", gov, "#1f4fd1"), ("shadow", sha, "#d1261f")):
        out.append(f'<g class="series {name}" fill="{colour}">')
        for p in series:
            cx, cy = frame(p)
            out.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="4"/>')
        out.append("</g>")
    if xbar is not None:
        cx, cy = frame(xbar)
        out.append(
            f'<g class="xbar" data-world="{xbar[0]:.17g},{xbar[1]:.17g}" stroke="black" stroke-width="2">'
            f'<line x1="{_f(cx - 8)}" y1="{_f(cy - 8)}" x2="{_f(cx + 8)}" y2="{_f(cy + 8)}"/>'
            f'<line x1="{_f(cx - 8)}" y1="{_f(cy + 8)}" x2="{_f(cx + 8)}" y2="{_f(cy - 8)}"/></g>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(trace, reference, path, sets=(), max_points: int | None = 40) -> Path:
    xbar = None if reference is None else reference.xbar
    path = Path(path)
    path.write_text(render_svg(trace, xbar, sets, max_points))
    return path
