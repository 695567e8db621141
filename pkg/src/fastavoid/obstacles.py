"""Analytic star-shaped obstacles, Gamma distance functions, and region tests.

Every shape is *star-shaped*: it carries a reference point strictly inside it
from which every boundary point is visible, so the ray from the reference
point through any exterior query crosses the boundary exactly once.  Gamma is
the ray-scaling distance surrogate

    Gamma(xi) = |xi - ref| / |boundary_hit - ref|

which equals 1 on the (margin-inflated) boundary, grows monotonically along
any ray from the reference point, and is exact for star shapes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import GammaSingularityError, InsideObstacleError

_SINGULARITY_EPS = 1e-12


@dataclass(frozen=True)
class AgentConfig:
    """Agent geometry and modulation tuning.

    radius:               body radius R in meters
    gap_distance:         margin distance D_gap in meters; the controller
                          guarantees motion never stalls further than this
                          from any obstacle
    control_point_offset: distance d_c of the evaluated control point ahead
                          of the wheel axle (meters)
    reactivity:           exponent shaping how sharply eigenvalues respond
                          to obstacle proximity
    scaling_potential:    exponent s of the analytic influence weights
    distance_scaling:     numerator D_scal of the influence weights
    power_weight:         exponent c_w of the wake-alignment weight used by
                          tail negligence
    """

    radius: float = 0.45
    gap_distance: float = 0.5
    control_point_offset: float = 6.25e-2
    reactivity: float = 1.0
    scaling_potential: float = 2.0
    distance_scaling: float = 1.0
    power_weight: float = 0.2

    def __post_init__(self):
        for name in ("radius", "gap_distance", "reactivity",
                     "scaling_potential", "distance_scaling", "power_weight"):
            if not getattr(self, name) > 0:
                raise ValueError(f"AgentConfig.{name} must be > 0")


class Region(enum.Enum):
    EXTERIOR = "exterior"
    MARGIN_EXTERIOR = "margin-exterior"
    BOUNDARY = "boundary"
    INTERIOR = "interior"


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _select_ray_roots(mb, sq, valid, a):
    """Smallest positive root of a*t^2 + ... per ray, inf where none."""
    t_near = (mb - sq) / a
    t_far = (mb + sq) / a
    t = np.where(t_near > 1e-9, t_near, np.where(t_far > 1e-9, t_far, np.inf))
    return np.where(valid, t, np.inf)


class StarObstacle:
    """Base star obstacle: placement, reference point, margin, rigid motion.

    Subclasses provide the raw shape through three body-frame hooks:
    `_body_contains`, `_body_boundary_distance` (ray from an interior origin)
    and `_body_normal` (outward normal at a boundary point).
    """

    def __init__(self, center, reference_point=None, orientation=0.0,
                 margin=0.0, linear_velocity=(0.0, 0.0), angular_velocity=0.0):
        self.center = np.asarray(center, dtype=float)
        self.orientation = float(orientation)
        self.margin = float(margin)
        self.linear_velocity = np.asarray(linear_velocity, dtype=float)
        self.angular_velocity = float(angular_velocity)
        if self.margin < 0:
            raise ValueError("margin must be >= 0")
        if reference_point is None:
            self.reference_point = self.center.copy()
        else:
            self.reference_point = np.asarray(reference_point, dtype=float)
        if not self.contains(self.reference_point):
            raise ValueError("reference point must lie strictly inside the shape")

    # body-frame hooks -------------------------------------------------

    def _body_contains(self, p: np.ndarray) -> bool:
        raise NotImplementedError

    def _body_ray_boundary(self, origin: np.ndarray, direction: np.ndarray) -> float:
        """Distance along unit `direction` from interior `origin` to the boundary."""
        raise NotImplementedError

    def _body_normal(self, p: np.ndarray) -> np.ndarray:
        """Outward unit normal at boundary point `p` (body frame)."""
        raise NotImplementedError

    # world-frame API ----------------------------------------------------

    def _rotations(self):
        """(world-from-body, body-from-world) matrices, cached per angle."""
        cache = getattr(self, "_rot_cache", None)
        if cache is None or cache[0] != self.orientation:
            c, s = np.cos(self.orientation), np.sin(self.orientation)
            fwd = np.array([[c, -s], [s, c]])
            cache = (self.orientation, fwd, fwd.T)
            self._rot_cache = cache
        return cache[1], cache[2]

    def to_body(self, xi: np.ndarray) -> np.ndarray:
        return self._rotations()[1] @ (np.asarray(xi, float) - self.center)

    def to_world_dir(self, v: np.ndarray) -> np.ndarray:
        return self._rotations()[0] @ v

    def contains(self, xi) -> bool:
        return self._body_contains(self.to_body(xi))

    def _ray_setup(self, xi):
        xi = np.asarray(xi, dtype=float)
        offset = xi - self.reference_point
        dist = float(np.hypot(*offset))
        if dist < _SINGULARITY_EPS:
            raise GammaSingularityError("gamma-singularity: query at reference point")
        return xi, offset / dist, dist

    def boundary_distance(self, direction: np.ndarray) -> float:
        """Distance from the reference point to the *true* surface along a
        world-frame unit direction (margin not applied)."""
        origin_b = self.to_body(self.reference_point)
        dir_b = self._rotations()[1] @ np.asarray(direction, float)
        return self._body_ray_boundary(origin_b, dir_b)

    def gamma(self, xi) -> float:
        """Ray-scaling distance surrogate; 1 on the margin-inflated boundary."""
        _, direction, dist = self._ray_setup(xi)
        b = self.boundary_distance(direction) + self.margin
        return dist / b

    def reference_direction(self, xi) -> np.ndarray:
        """Unit vector from the reference point toward the query point."""
        _, direction, _ = self._ray_setup(xi)
        return direction

    def surface_normal(self, xi, strict: bool = True) -> np.ndarray:
        """Outward unit normal at the boundary point hit by the ray
        reference -> xi.  Raises for interior queries unless `strict` is
        disabled (the normal stays well-defined along the ray)."""
        _, direction, dist = self._ray_setup(xi)
        b = self.boundary_distance(direction)
        if strict and dist < b + self.margin - 1e-12:
            raise InsideObstacleError("inside-obstacle: normal query from interior")
        hit_b = self.to_body(self.reference_point + b * direction)
        return self.to_world_dir(self._body_normal(hit_b))

    def evaluate(self, xi):
        """(gamma, reference direction, outward surface normal) in one ray
        pass; the workhorse of the per-obstacle modulation loops."""
        _, direction, dist = self._ray_setup(xi)
        b = self.boundary_distance(direction)
        gamma = dist / (b + self.margin)
        hit_b = self.to_body(self.reference_point + b * direction)
        normal = self.to_world_dir(self._body_normal(hit_b))
        return gamma, direction, normal

    def velocity_at(self, xi) -> np.ndarray:
        """Rigid-body velocity of the obstacle material point at xi (in-plane)."""
        r = np.asarray(xi, float) - self.center
        spin = self.angular_velocity * np.array([-r[1], r[0]])
        return self.linear_velocity + spin

    def advance(self, dt: float) -> None:
        self.center = self.center + self.linear_velocity * dt
        self.reference_point = self.reference_point + self.linear_velocity * dt
        self.orientation += self.angular_velocity * dt

    def surface_distance(self, xi) -> float:
        """Euclidean distance from xi to the true surface (negative inside).

        Generic fallback: ray-based distance. Subclasses override with exact
        geometry; only the exact versions are used for collision accounting.
        """
        _, direction, dist = self._ray_setup(xi)
        return dist - self.boundary_distance(direction)

    def ray_t_batch(self, origin, directions) -> np.ndarray:
        """Smallest positive ray parameter per direction against the true
        surface; inf where the ray misses. `directions` is (N, 2)."""
        raise NotImplementedError

    def ray_intersection(self, origin, direction) -> float:
        """Smallest positive ray parameter hitting the true surface, or inf."""
        return float(self.ray_t_batch(origin, np.asarray(direction, float)[None, :])[0])

    def gamma_batch(self, points) -> np.ndarray:
        """Vectorized gamma over (N, 2) query points (0 at the reference)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rel = pts - self.reference_point
        dist = np.sqrt(np.einsum("ij,ij->i", rel, rel))
        safe = dist > _SINGULARITY_EPS
        dirs = np.where(safe[:, None], rel / np.where(safe, dist, 1.0)[:, None],
                        np.array([1.0, 0.0]))
        t = self.ray_t_batch(self.reference_point, dirs)
        return np.where(safe, dist / (t + self.margin), 0.0)

    def check_star_shape(self, samples: int = 360) -> bool:
        """Sample boundary points and verify <reference_dir, normal> > 0."""
        for phi in np.linspace(0.0, 2 * np.pi, samples, endpoint=False):
            d = np.array([np.cos(phi), np.sin(phi)])
            b = self.boundary_distance(d) + self.margin
            xi = self.reference_point + (b * 1.0000001) * d
            n = self.surface_normal(xi)
            if float(d @ n) <= 0:
                return False
        return True


class Circle(StarObstacle):
    def __init__(self, radius, center, **kw):
        self.shape_radius = float(radius)
        if self.shape_radius <= 0:
            raise ValueError("circle radius must be > 0")
        super().__init__(center, **kw)

    def _body_contains(self, p):
        return float(p @ p) < self.shape_radius ** 2

    def _body_ray_boundary(self, origin, direction):
        # |origin + t d| = rho, take the positive root
        b = float(origin @ direction)
        c = float(origin @ origin) - self.shape_radius ** 2
        disc = b * b - c
        return -b + np.sqrt(max(disc, 0.0))

    def _body_normal(self, p):
        return p / np.linalg.norm(p)

    def surface_distance(self, xi):
        return float(np.linalg.norm(np.asarray(xi, float) - self.center)) - self.shape_radius

    def ray_t_batch(self, origin, directions):
        d = np.atleast_2d(np.asarray(directions, float))
        oc = np.asarray(origin, float) - self.center
        b = d @ oc
        c = float(oc @ oc) - self.shape_radius ** 2
        disc = b * b - c
        return _select_ray_roots(-b, np.sqrt(np.maximum(disc, 0.0)), disc >= 0,
                                 np.ones(len(d)))


class Ellipse(StarObstacle):
    def __init__(self, semi_axes, center, **kw):
        a, b = float(semi_axes[0]), float(semi_axes[1])
        if a <= 0 or b <= 0:
            raise ValueError("ellipse semi-axes must be > 0")
        self.semi_axes = (a, b)
        super().__init__(center, **kw)

    def _body_contains(self, p):
        a, b = self.semi_axes
        return (p[0] / a) ** 2 + (p[1] / b) ** 2 < 1.0

    def _body_ray_boundary(self, origin, direction):
        a, b = self.semi_axes
        o = np.array([origin[0] / a, origin[1] / b])
        d = np.array([direction[0] / a, direction[1] / b])
        A = float(d @ d)
        B = float(o @ d)
        C = float(o @ o) - 1.0
        disc = B * B - A * C
        return (-B + np.sqrt(max(disc, 0.0))) / A

    def _body_normal(self, p):
        a, b = self.semi_axes
        g = np.array([p[0] / a ** 2, p[1] / b ** 2])
        return g / np.linalg.norm(g)

    def surface_distance(self, xi):
        """Exact point-to-ellipse distance (bisection on the foot angle)."""
        a, b = self.semi_axes
        p = np.abs(self.to_body(xi))
        inside = (p[0] / a) ** 2 + (p[1] / b) ** 2 < 1.0

        # Perpendicular-foot condition: (p - q(phi)) orthogonal to the tangent
        # (-a sin, b cos); g flips sign exactly once on [0, pi/2] for exterior
        # points in the closed first quadrant.
        def g(phi):
            q = np.array([a * np.cos(phi), b * np.sin(phi)])
            return float((p - q) @ np.array([-a * np.sin(phi), b * np.cos(phi)]))

        lo, hi = 0.0, np.pi / 2
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if g(mid) > 0:
                lo = mid
            else:
                hi = mid
        phi = 0.5 * (lo + hi)
        foot = np.array([a * np.cos(phi), b * np.sin(phi)])
        # axis feet guard deep-interior points where the bracket is not unique
        d = min(float(np.linalg.norm(p - foot)),
                float(np.linalg.norm(p - np.array([a, 0.0]))),
                float(np.linalg.norm(p - np.array([0.0, b]))))
        return -d if inside else d

    def ray_t_batch(self, origin, directions):
        a, b = self.semi_axes
        R = self._rotations()[1]
        o = R @ (np.asarray(origin, float) - self.center)
        d = np.atleast_2d(np.asarray(directions, float)) @ R.T
        o = np.array([o[0] / a, o[1] / b])
        d = d / np.array([a, b])
        A = np.einsum("ij,ij->i", d, d)
        B = d @ o
        C = float(o @ o) - 1.0
        disc = B * B - A * C
        return _select_ray_roots(-B, np.sqrt(np.maximum(disc, 0.0)), disc >= 0, A)


class ConvexPolygon(StarObstacle):
    """Convex polygon given by body-frame vertices (counter-clockwise)."""

    def __init__(self, vertices, center, **kw):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
            raise ValueError("polygon needs >= 3 planar vertices")
        if _signed_area(v) < 0:
            v = v[::-1].copy()
        if not _is_convex(v):
            raise ValueError("polygon must be convex")
        self.vertices = v
        edges = np.roll(v, -1, axis=0) - v
        # outward normals of CCW edges
        self.edge_normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
        self.edge_normals /= np.linalg.norm(self.edge_normals, axis=1, keepdims=True)
        super().__init__(center, **kw)

    def _body_contains(self, p):
        rel = p[None, :] - self.vertices
        return bool(np.all(np.einsum("ij,ij->i", rel, self.edge_normals) < 0))

    def _edge_hits(self, origin, direction):
        """Ray parameters against every edge; inf where missed."""
        v0 = self.vertices
        v1 = np.roll(v0, -1, axis=0)
        e = v1 - v0
        d = direction
        denom = d[0] * (-e[:, 1]) - d[1] * (-e[:, 0])
        rhs = v0 - origin
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (rhs[:, 0] * (-e[:, 1]) - rhs[:, 1] * (-e[:, 0])) / denom
            s = (d[0] * rhs[:, 1] - d[1] * rhs[:, 0]) / denom
        ok = (np.abs(denom) > 1e-14) & (t > 1e-9) & (s >= -1e-12) & (s <= 1 + 1e-12)
        return np.where(ok, t, np.inf), s

    def _body_ray_boundary(self, origin, direction):
        t, _ = self._edge_hits(origin, direction)
        return float(np.min(t))

    def _body_normal(self, p):
        v0 = self.vertices
        v1 = np.roll(v0, -1, axis=0)
        e = v1 - v0
        lens = np.linalg.norm(e, axis=1)
        rel = p[None, :] - v0
        proj = np.clip(np.einsum("ij,ij->i", rel, e) / lens ** 2, 0.0, 1.0)
        foot = v0 + proj[:, None] * e
        d = np.linalg.norm(p[None, :] - foot, axis=1)
        i = int(np.argmin(d))
        # vertex hit: average the two adjacent face normals (angle bisector)
        j = (i - 1) % len(v0) if proj[i] < 1e-9 else ((i + 1) % len(v0) if proj[i] > 1 - 1e-9 else None)
        if j is not None and abs(d[j] - d[i]) < 1e-9:
            n = self.edge_normals[i] + self.edge_normals[j]
            return n / np.linalg.norm(n)
        return self.edge_normals[i]

    def surface_distance(self, xi):
        p = self.to_body(xi)
        v0 = self.vertices
        v1 = np.roll(v0, -1, axis=0)
        e = v1 - v0
        lens2 = np.einsum("ij,ij->i", e, e)
        rel = p[None, :] - v0
        proj = np.clip(np.einsum("ij,ij->i", rel, e) / lens2, 0.0, 1.0)
        foot = v0 + proj[:, None] * e
        d = float(np.min(np.linalg.norm(p[None, :] - foot, axis=1)))
        return -d if self._body_contains(p) else d

    def ray_t_batch(self, origin, directions):
        R = self._rotations()[1]
        o = R @ (np.asarray(origin, float) - self.center)
        d = np.atleast_2d(np.asarray(directions, float)) @ R.T
        v0 = self.vertices
        e = np.roll(v0, -1, axis=0) - v0
        rhs = v0 - o                                     # (E, 2)
        numer_t = rhs[:, 1] * e[:, 0] - rhs[:, 0] * e[:, 1]      # (E,)
        denom = d[:, 1:2] * e[None, :, 0] - d[:, 0:1] * e[None, :, 1]  # (N, E)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = numer_t[None, :] / denom
            s = (d[:, 0:1] * rhs[None, :, 1] - d[:, 1:2] * rhs[None, :, 0]) / denom
        ok = (np.abs(denom) > 1e-14) & (t > 1e-9) & (s >= -1e-12) & (s <= 1 + 1e-12)
        t = np.where(ok, t, np.inf)
        return np.min(t, axis=1)


def rectangle(width, height, center, **kw) -> ConvexPolygon:
    """Axis-aligned rectangle helper (body frame; rotate via orientation)."""
    w, h = width / 2.0, height / 2.0
    return ConvexPolygon([(-w, -h), (w, -h), (w, h), (-w, h)], center, **kw)


class RoundedPolygon(ConvexPolygon):
    """Minkowski sum of a convex polygon with a disc of radius `rounding`.

    The boundary is the exact disc-offset: faces shifted outward along their
    normals, corners replaced by arcs. Normals rotate continuously around
    corners, which keeps boundary-tangent flows from corner-cutting.
    """

    def __init__(self, vertices, rounding, center, **kw):
        self.rounding = float(rounding)
        if self.rounding < 0:
            raise ValueError("rounding must be >= 0")
        super().__init__(vertices, center, **kw)

    def _body_contains(self, p):
        return self._poly_signed_distance(p) < self.rounding

    def _poly_signed_distance(self, p):
        v0 = self.vertices
        v1 = np.roll(v0, -1, axis=0)
        e = v1 - v0
        lens2 = np.einsum("ij,ij->i", e, e)
        rel = p[None, :] - v0
        proj = np.clip(np.einsum("ij,ij->i", rel, e) / lens2, 0.0, 1.0)
        foot = v0 + proj[:, None] * e
        d = float(np.min(np.linalg.norm(p[None, :] - foot, axis=1)))
        inside = bool(np.all(np.einsum("ij,ij->i", rel, self.edge_normals) < 0))
        return -d if inside else d

    def _body_ray_boundary(self, origin, direction):
        return float(self._body_ray_batch(origin,
                                          np.asarray(direction, float)[None, :])[0])

    def _body_normal(self, p):
        # nearest feature of the underlying polygon decides: vertex -> arc
        # normal, face -> face normal
        v0 = self.vertices
        v1 = np.roll(v0, -1, axis=0)
        e = v1 - v0
        lens2 = np.einsum("ij,ij->i", e, e)
        rel = p[None, :] - v0
        proj = np.clip(np.einsum("ij,ij->i", rel, e) / lens2, 0.0, 1.0)
        foot = v0 + proj[:, None] * e
        dists = np.linalg.norm(p[None, :] - foot, axis=1)
        i = int(np.argmin(dists))
        if 1e-9 < proj[i] < 1 - 1e-9:
            return self.edge_normals[i]
        vertex = v0[i] if proj[i] <= 1e-9 else v1[i]
        u = p - vertex
        nu = float(np.linalg.norm(u))
        if nu < 1e-12:
            return self.edge_normals[i]
        return u / nu

    def _body_ray_batch(self, origin, dirs):
        """First hit of each ray against offset faces and corner arcs."""
        rho = self.rounding
        v0 = self.vertices
        v1 = np.roll(v0, -1, axis=0)
        n = self.edge_normals
        # offset face segments
        a = v0 + rho * n
        e = v1 - v0
        rhs = a - origin
        numer_t = rhs[:, 1] * e[:, 0] - rhs[:, 0] * e[:, 1]
        denom = dirs[:, 1:2] * e[None, :, 0] - dirs[:, 0:1] * e[None, :, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = numer_t[None, :] / denom
            s = (dirs[:, 0:1] * rhs[None, :, 1] - dirs[:, 1:2] * rhs[None, :, 0]) / denom
        ok = (np.abs(denom) > 1e-14) & (t > 1e-9) & (s >= -1e-12) & (s <= 1 + 1e-12)
        best = np.min(np.where(ok, t, np.inf), axis=1)
        if rho <= 0:
            return best
        # corner arcs: circle hits whose direction falls inside the normal wedge
        n_prev = np.roll(n, 1, axis=0)
        for i in range(len(v0)):
            oc = origin - v0[i]
            b = dirs @ oc
            c = float(oc @ oc) - rho * rho
            disc = b * b - c
            valid = disc >= 0
            sq = np.sqrt(np.maximum(disc, 0.0))
            for root in (-b - sq, -b + sq):
                hit = valid & (root > 1e-9)
                tt = np.where(hit, root, 0.0)
                q = origin + tt[:, None] * dirs - v0[i]
                in_wedge = ((n_prev[i, 0] * q[:, 1] - n_prev[i, 1] * q[:, 0] >= -1e-12)
                            & (q[:, 0] * n[i, 1] - q[:, 1] * n[i, 0] >= -1e-12))
                cand = np.where(hit & in_wedge, tt, np.inf)
                best = np.minimum(best, cand)
        return best

    def ray_t_batch(self, origin, directions):
        R = self._rotations()[1]
        o = R @ (np.asarray(origin, float) - self.center)
        d = np.atleast_2d(np.asarray(directions, float)) @ R.T
        return self._body_ray_batch(o, d)

    def surface_distance(self, xi):
        return self._poly_signed_distance(self.to_body(xi)) - self.rounding


def inflate(obstacle: StarObstacle, extra: float) -> StarObstacle:
    """Geometrically grown copy: the returned shape contains the Minkowski
    sum of the original with a disc of radius `extra`.

    Modulating around obstacles inflated by the agent radius makes the
    center-point guarantees hold for the whole body. Circles grow exactly;
    ellipses grow both semi-axes (a slightly conservative superset of the
    true offset); polygons offset every face outward, which sharpens corners
    conservatively instead of rounding them.
    """
    extra = float(extra)
    kw = dict(
        center=obstacle.center.copy(),
        reference_point=obstacle.reference_point.copy(),
        orientation=obstacle.orientation,
        margin=obstacle.margin,
        linear_velocity=obstacle.linear_velocity.copy(),
        angular_velocity=obstacle.angular_velocity,
    )
    if isinstance(obstacle, Circle):
        return Circle(obstacle.shape_radius + extra, **kw)
    if isinstance(obstacle, Ellipse):
        a, b = obstacle.semi_axes
        pad = _ellipse_offset_pad(a, b, extra)
        return Ellipse((a + extra + pad, b + extra + pad), **kw)
    if isinstance(obstacle, RoundedPolygon):
        return RoundedPolygon(obstacle.vertices, obstacle.rounding + extra, **kw)
    if isinstance(obstacle, ConvexPolygon):
        return RoundedPolygon(obstacle.vertices, extra, **kw)
    raise TypeError(f"cannot inflate {type(obstacle)!r}")


def _ellipse_offset_pad(a, b, extra, samples=720):
    """Smallest uniform axis growth beyond `extra` so the grown ellipse
    contains the true disc-offset boundary (which bulges past (a+e, b+e)
    between the axes of elongated ellipses)."""
    th = np.linspace(0.0, np.pi / 2, samples)
    p = np.stack([a * np.cos(th), b * np.sin(th)], axis=1)
    n = np.stack([np.cos(th) / a, np.sin(th) / b], axis=1)
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    q = p + extra * n

    def contained(pad):
        return bool(np.all((q[:, 0] / (a + extra + pad)) ** 2
                           + (q[:, 1] / (b + extra + pad)) ** 2 <= 1.0))

    hi = max(extra, 1e-6)
    while not contained(hi):
        hi *= 2.0
    lo = 0.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if contained(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _is_convex(v: np.ndarray) -> bool:
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    return bool(np.all(cross > -1e-12))


BOUNDARY_RTOL = 1e-9


def classify(obstacles, xi, config: AgentConfig) -> Region:
    """Region of a query point with respect to a whole obstacle set.

    Interior beats boundary beats exterior; the margin-exterior test moves
    the query R + D_gap toward each obstacle along its reference ray and
    requires the moved point to stay exterior.
    """
    xi = np.asarray(xi, dtype=float)
    if not obstacles:
        return Region.MARGIN_EXTERIOR
    gammas = [obs.gamma(xi) for obs in obstacles]
    g_min = min(gammas)
    if g_min < 1.0 - BOUNDARY_RTOL:
        return Region.INTERIOR
    if g_min <= 1.0 + BOUNDARY_RTOL:
        return Region.BOUNDARY
    reach = config.radius + config.gap_distance
    for obs in obstacles:
        d = obs.reference_direction(xi)
        if float(np.linalg.norm(xi - obs.reference_point)) <= reach:
            return Region.EXTERIOR
        moved = xi - reach * d
        if obs.gamma(moved) <= 1.0:
            return Region.EXTERIOR
    return Region.MARGIN_EXTERIOR
