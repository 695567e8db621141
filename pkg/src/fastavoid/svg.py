"""Minimal SVG emission for vector fields, scenes and trajectories.

Deliberately dependency-free: numeric CSVs always accompany the pictures,
so this only needs to be good enough to eyeball a field or a rollout.
"""

from __future__ import annotations

import math

import numpy as np


class SvgCanvas:
    def __init__(self, bounds, size=720, pad=0.05):
        xmin, ymin, xmax, ymax = bounds
        span = max(xmax - xmin, ymax - ymin)
        margin = pad * span
        self.xmin, self.ymin = xmin - margin, ymin - margin
        self.span = span + 2 * margin
        self.size = size
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
            f'height="{size}" viewBox="0 0 {size} {size}">',
            f'<rect width="{size}" height="{size}" fill="white"/>',
        ]

    def tx(self, p):
        x = (p[0] - self.xmin) / self.span * self.size
        y = self.size - (p[1] - self.ymin) / self.span * self.size
        return x, y

    def scale(self, length):
        return length / self.span * self.size

    def line(self, a, b, color="#444", width=1.0):
        (x1, y1), (x2, y2) = self.tx(a), self.tx(b)
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width}"/>')

    def circle(self, center, radius, fill="#b5651d", stroke="none", alpha=1.0):
        x, y = self.tx(center)
        self.parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{self.scale(radius):.2f}" '
            f'fill="{fill}" stroke="{stroke}" opacity="{alpha}"/>')

    def polygon(self, points, fill="#b5651d", alpha=1.0):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(self.tx, points))
        self.parts.append(f'<polygon points="{coords}" fill="{fill}" '
                          f'opacity="{alpha}"/>')

    def ellipse(self, center, axes, orientation, fill="#b5651d", alpha=1.0):
        x, y = self.tx(center)
        deg = -math.degrees(orientation)
        self.parts.append(
            f'<ellipse cx="{x:.2f}" cy="{y:.2f}" rx="{self.scale(axes[0]):.2f}" '
            f'ry="{self.scale(axes[1]):.2f}" fill="{fill}" opacity="{alpha}" '
            f'transform="rotate({deg:.2f} {x:.2f} {y:.2f})"/>')

    def arrow(self, origin, vector, scale=0.3, color="#1f77b4", width=1.2):
        v = np.asarray(vector, dtype=float)
        norm = float(np.hypot(*v))
        if norm < 1e-12:
            self.circle(origin, 0.01 * self.span, fill=color)
            return
        tip = np.asarray(origin) + scale * v
        self.line(origin, tip, color=color, width=width)
        u = v / norm
        left = np.array([-u[1], u[0]])
        head = 0.25 * scale * norm
        self.line(tip, tip - head * (u - 0.5 * left), color=color, width=width)
        self.line(tip, tip - head * (u + 0.5 * left), color=color, width=width)

    def text(self, pos, s, size=12, color="#222"):
        x, y = self.tx(pos)
        self.parts.append(f'<text x="{x:.1f}" y="{y:.1f}" font-size="{size}" '
                          f'fill="{color}">{s}</text>')

    def to_string(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def draw_obstacle(canvas: SvgCanvas, obs, fill="#b5651d", alpha=0.85):
    from .obstacles import Circle, ConvexPolygon, Ellipse

    if isinstance(obs, Circle):
        canvas.circle(obs.center, obs.shape_radius, fill=fill, alpha=alpha)
    elif isinstance(obs, Ellipse):
        canvas.ellipse(obs.center, obs.semi_axes, obs.orientation,
                       fill=fill, alpha=alpha)
    elif isinstance(obs, ConvexPolygon):
        world = (obs._rotations()[0] @ obs.vertices.T).T + obs.center
        canvas.polygon(world, fill=fill, alpha=alpha)


def render_field(bounds, nodes, vectors, obstacles=(), scan_points=None,
                 blocked=None, arrow_scale=0.25) -> str:
    """Quiver plot: one arrow per node; obstacles brown, scan points black."""
    canvas = SvgCanvas(bounds)
    for obs in obstacles:
        draw_obstacle(canvas, obs)
    if scan_points is not None and len(scan_points):
        for p in scan_points:
            canvas.circle(p, 0.004 * canvas.span, fill="#111")
    blocked = set() if blocked is None else set(blocked)
    for i, (node, vec) in enumerate(zip(nodes, vectors)):
        if i in blocked:
            canvas.circle(node, 0.003 * canvas.span, fill="#bbb")
        else:
            canvas.arrow(node, vec, scale=arrow_scale)
    return canvas.to_string()


def render_trajectory(bounds, states, obstacles=(), attractor=None,
                      radius=None) -> str:
    canvas = SvgCanvas(bounds)
    for obs in obstacles:
        draw_obstacle(canvas, obs)
    pts = np.asarray(states)
    for a, b in zip(pts[:-1], pts[1:]):
        canvas.line(a[:2], b[:2], color="#1f77b4", width=1.6)
    if len(pts):
        if radius:
            canvas.circle(pts[0][:2], radius, fill="none", stroke="#1f77b4")
        canvas.circle(pts[0][:2], 0.01 * canvas.span, fill="#2ca02c")
        canvas.circle(pts[-1][:2], 0.01 * canvas.span, fill="#d62728")
    if attractor is not None:
        canvas.text(attractor, "*", size=22, color="#000")
    return canvas.to_string()
