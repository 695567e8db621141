import math

import numpy as np
import pytest

from fastavoid.obstacles import Circle, ConvexPolygon, Ellipse


def random_obstacle(rng, center=None, allow_offset_reference=True):
    """Random star obstacle of any supported shape."""
    if center is None:
        center = rng.uniform(-4, 4, 2)
    kind = rng.integers(0, 3)
    if kind == 0:
        radius = rng.uniform(0.3, 1.2)
        obs = Circle(radius, center=center)
        inner = radius
    elif kind == 1:
        axes = (rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5))
        obs = Ellipse(axes, center=center, orientation=rng.uniform(0, math.pi))
        inner = min(axes)
    else:
        n = int(rng.integers(4, 8))
        # stratified angles keep the origin inside the hull
        angles = 2 * math.pi * (np.arange(n) + rng.uniform(0.05, 0.95, n)) / n
        radii = rng.uniform(0.5, 1.2, n)
        verts = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
        hull = _convex_hull(verts)
        obs = ConvexPolygon(hull, center=center,
                            orientation=rng.uniform(0, math.pi))
        inner = 0.2
    if allow_offset_reference and rng.random() < 0.5:
        offset = rng.uniform(-0.25, 0.25, 2) * inner
        obs.reference_point = obs.center + offset
        if not obs.contains(obs.reference_point):
            obs.reference_point = obs.center.copy()
    return obs


def _convex_hull(points):
    pts = sorted(map(tuple, points))
    if len(pts) <= 3:
        return np.asarray(pts)

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return np.asarray(lower[:-1] + upper[:-1])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def exterior_point(rng, obstacle, min_gamma=1.05, max_tries=100):
    for _ in range(max_tries):
        p = obstacle.center + rng.uniform(-6, 6, 2)
        try:
            if obstacle.gamma(p) >= min_gamma:
                return p
        except Exception:
            continue
    raise RuntimeError("no exterior point found")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
