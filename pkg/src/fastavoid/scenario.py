"""Scenario files: schema validation, (de)serialization, hashing.

A scenario fully determines a rollout together with its seed; loading and
re-saving is lossless. Schema violations are reported with JSON-pointer
paths so batch users can locate the offending key.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ScenarioError
from .obstacles import AgentConfig, Circle, ConvexPolygon, Ellipse, StarObstacle

MODES = ("analytic", "sampled", "mixed")
SCHEMES = ("rk4", "euler")


@dataclass
class ScanSpec:
    delta: float = 7e-3
    fov: tuple = (-math.pi, math.pi)
    max_range: float = 15.0
    noise_sigma: float = 0.0

    def to_dict(self):
        return {"delta": self.delta, "fov": list(self.fov),
                "max_range": self.max_range, "noise_sigma": self.noise_sigma}


@dataclass
class IntegratorSpec:
    dt: float = 0.01
    scheme: str = "rk4"

    def to_dict(self):
        return {"dt": self.dt, "scheme": self.scheme}


@dataclass
class Scenario:
    obstacles: list = field(default_factory=list)
    tracked: list = field(default_factory=list)   # parallel to obstacles
    wall: tuple | None = None                      # (xmin, ymin, xmax, ymax[, thickness])
    agent: AgentConfig = field(default_factory=AgentConfig)
    start: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attractor: np.ndarray | None = None
    scan: ScanSpec = field(default_factory=ScanSpec)
    integrator: IntegratorSpec = field(default_factory=IntegratorSpec)
    seed: int = 0
    mode: str = "mixed"
    tail: bool = True
    t_max: float = 60.0
    v_max: float = 1.0

    def __post_init__(self):
        self.start = np.asarray(self.start, dtype=float)
        if self.start.size == 2:
            self.start = np.append(self.start, 0.0)
        if self.attractor is not None:
            self.attractor = np.asarray(self.attractor, dtype=float)
        if not self.tracked:
            self.tracked = [True] * len(self.obstacles)

    def world_obstacles(self):
        """All physical obstacles: declared ones plus wall slabs."""
        return list(self.obstacles) + wall_slabs(self.wall)

    def tracked_obstacles(self):
        """Obstacles the mixed mode receives analytically (walls never are)."""
        return [o for o, tr in zip(self.obstacles, self.tracked) if tr]

    def to_dict(self) -> dict:
        d = {
            "obstacles": [
                {**obstacle_to_dict(o), "tracked": bool(tr)}
                for o, tr in zip(self.obstacles, self.tracked)
            ],
            "agent": {
                "radius": self.agent.radius,
                "gap_distance": self.agent.gap_distance,
                "control_point_offset": self.agent.control_point_offset,
                "reactivity": self.agent.reactivity,
                "scaling_potential": self.agent.scaling_potential,
                "distance_scaling": self.agent.distance_scaling,
                "power_weight": self.agent.power_weight,
            },
            "start": [float(v) for v in self.start],
            "scan": self.scan.to_dict(),
            "integrator": self.integrator.to_dict(),
            "seed": self.seed,
            "mode": self.mode,
            "tail": self.tail,
            "t_max": self.t_max,
            "v_max": self.v_max,
        }
        if self.wall is not None:
            d["wall"] = list(self.wall)
        if self.attractor is not None:
            d["attractor"] = [float(v) for v in self.attractor]
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, **kw)

    def sha256(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return parse_scenario(data)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError("", f"not valid JSON: {e}") from e
        return parse_scenario(data)

    @classmethod
    def load(cls, path) -> "Scenario":
        return cls.from_json(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")


WALL_THICKNESS = 0.5


def wall_slabs(wall) -> list:
    """Expand a bounding wall into four rectangle slabs outside the bounds."""
    if wall is None:
        return []
    xmin, ymin, xmax, ymax = wall[:4]
    th = wall[4] if len(wall) > 4 else WALL_THICKNESS
    w, h = xmax - xmin, ymax - ymin
    cx, cy = (xmin + xmax) / 2, (ymin + ymax) / 2
    long_w = w + 2 * th

    def rect(width, height, center):
        hw, hh = width / 2, height / 2
        return ConvexPolygon([(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)],
                             center=center)

    return [
        rect(long_w, th, (cx, ymax + th / 2)),
        rect(long_w, th, (cx, ymin - th / 2)),
        rect(th, h, (xmin - th / 2, cy)),
        rect(th, h, (xmax + th / 2, cy)),
    ]


# ---------------------------------------------------------------------------
# dict <-> obstacle

def obstacle_to_dict(obs: StarObstacle) -> dict:
    d = {
        "center": [float(v) for v in obs.center],
        "reference_point": [float(v) for v in obs.reference_point],
        "orientation": obs.orientation,
        "margin": obs.margin,
        "velocity": [float(v) for v in obs.linear_velocity],
        "angular_velocity": obs.angular_velocity,
    }
    if isinstance(obs, Circle):
        d["type"] = "circle"
        d["radius"] = obs.shape_radius
    elif isinstance(obs, Ellipse):
        d["type"] = "ellipse"
        d["axes"] = list(obs.semi_axes)
    elif isinstance(obs, ConvexPolygon):
        d["type"] = "polygon"
        d["vertices"] = obs.vertices.tolist()
    else:
        raise TypeError(f"unknown obstacle type {type(obs)!r}")
    return d


def obstacle_from_dict(data: dict, pointer: str = "") -> StarObstacle:
    _expect(data, dict, pointer, "object")
    kind = data.get("type")
    if kind not in ("circle", "ellipse", "polygon"):
        raise ScenarioError(f"{pointer}/type",
                            "expected one of 'circle', 'ellipse', 'polygon'")
    center = _vec(data, "center", pointer, required=True)
    kw = dict(
        center=center,
        reference_point=_vec(data, "reference_point", pointer),
        orientation=_num(data, "orientation", pointer, default=0.0),
        margin=_num(data, "margin", pointer, default=0.0, minimum=0.0),
        linear_velocity=_vec(data, "velocity", pointer) if "velocity" in data else (0.0, 0.0),
        angular_velocity=_num(data, "angular_velocity", pointer, default=0.0),
    )
    if kw["reference_point"] is None:
        del kw["reference_point"]
    try:
        if kind == "circle":
            return Circle(_num(data, "radius", pointer, required=True,
                               strictly_positive=True), **kw)
        if kind == "ellipse":
            axes = data.get("axes")
            if (not isinstance(axes, (list, tuple)) or len(axes) != 2
                    or not all(isinstance(v, (int, float)) and v > 0 for v in axes)):
                raise ScenarioError(f"{pointer}/axes",
                                    "expected two positive numbers")
            return Ellipse(axes, **kw)
        verts = data.get("vertices")
        if not isinstance(verts, list) or len(verts) < 3:
            raise ScenarioError(f"{pointer}/vertices",
                                "expected a list of >= 3 [x, y] pairs")
        return ConvexPolygon(verts, **kw)
    except ValueError as e:
        raise ScenarioError(pointer, str(e)) from e


# ---------------------------------------------------------------------------
# dict -> scenario

def parse_scenario(data: dict) -> Scenario:
    _expect(data, dict, "", "object")
    obstacles, tracked = [], []
    raw_obs = data.get("obstacles", [])
    if not isinstance(raw_obs, list):
        raise ScenarioError("/obstacles", "expected an array")
    for i, entry in enumerate(raw_obs):
        ptr = f"/obstacles/{i}"
        obstacles.append(obstacle_from_dict(entry, ptr))
        tr = entry.get("tracked", True)
        if not isinstance(tr, bool):
            raise ScenarioError(f"{ptr}/tracked", "expected a boolean")
        tracked.append(tr)

    wall = None
    if "wall" in data:
        w = data["wall"]
        if (not isinstance(w, list) or len(w) not in (4, 5)
                or not all(isinstance(v, (int, float)) for v in w)):
            raise ScenarioError("/wall", "expected [xmin, ymin, xmax, ymax(, thickness)]")
        if not (w[0] < w[2] and w[1] < w[3]):
            raise ScenarioError("/wall", "expected xmin < xmax and ymin < ymax")
        wall = tuple(float(v) for v in w)

    agent_raw = data.get("agent", {})
    _expect(agent_raw, dict, "/agent", "object")
    agent_kw = {}
    for key in ("radius", "gap_distance", "control_point_offset", "reactivity",
                "scaling_potential", "distance_scaling", "power_weight"):
        if key in agent_raw:
            agent_kw[key] = _num(agent_raw, key, "/agent", required=True)
    unknown = set(agent_raw) - set(agent_kw)
    if unknown:
        raise ScenarioError(f"/agent/{sorted(unknown)[0]}", "unknown agent key")
    try:
        agent = AgentConfig(**agent_kw)
    except ValueError as e:
        raise ScenarioError("/agent", str(e)) from e

    start = data.get("start")
    if (not isinstance(start, list) or len(start) not in (2, 3)
            or not all(isinstance(v, (int, float)) for v in start)):
        raise ScenarioError("/start", "expected [x, y] or [x, y, theta]")

    attractor = None
    if "attractor" in data:
        attractor = _vec(data, "attractor", "", required=True)

    scan_raw = data.get("scan", {})
    _expect(scan_raw, dict, "/scan", "object")
    scan = ScanSpec(
        delta=_num(scan_raw, "delta", "/scan", default=7e-3, strictly_positive=True),
        fov=tuple(scan_raw.get("fov", (-math.pi, math.pi))),
        max_range=_num(scan_raw, "max_range", "/scan", default=15.0,
                       strictly_positive=True),
        noise_sigma=_num(scan_raw, "noise_sigma", "/scan", default=0.0, minimum=0.0),
    )
    if len(scan.fov) != 2 or not scan.fov[0] < scan.fov[1]:
        raise ScenarioError("/scan/fov", "expected [min_rad, max_rad] with min < max")

    integ_raw = data.get("integrator", {})
    _expect(integ_raw, dict, "/integrator", "object")
    scheme = integ_raw.get("scheme", "rk4")
    if scheme not in SCHEMES:
        raise ScenarioError("/integrator/scheme", f"expected one of {SCHEMES}")
    integrator = IntegratorSpec(
        dt=_num(integ_raw, "dt", "/integrator", default=0.01, strictly_positive=True),
        scheme=scheme,
    )

    mode = data.get("mode", "mixed")
    if mode not in MODES:
        raise ScenarioError("/mode", f"expected one of {MODES}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int):
        raise ScenarioError("/seed", "expected an integer")

    return Scenario(
        obstacles=obstacles, tracked=tracked, wall=wall, agent=agent,
        start=np.asarray(start, float), attractor=attractor, scan=scan,
        integrator=integrator, seed=seed, mode=mode,
        tail=_bool(data, "tail", default=True),
        t_max=_num(data, "t_max", "", default=60.0, strictly_positive=True),
        v_max=_num(data, "v_max", "", default=1.0, strictly_positive=True),
    )


# ---------------------------------------------------------------------------
# small validators

def _expect(value, typ, pointer, name):
    if not isinstance(value, typ):
        raise ScenarioError(pointer or "/", f"expected {name}")


def _num(data, key, pointer, default=None, required=False,
         strictly_positive=False, minimum=None):
    if key not in data:
        if required:
            raise ScenarioError(f"{pointer}/{key}", "missing required number")
        return default
    v = data[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ScenarioError(f"{pointer}/{key}", "expected a number")
    if strictly_positive and not v > 0:
        raise ScenarioError(f"{pointer}/{key}", "expected a positive number")
    if minimum is not None and v < minimum:
        raise ScenarioError(f"{pointer}/{key}", f"expected >= {minimum}")
    return float(v)


def _vec(data, key, pointer, required=False):
    if key not in data:
        if required:
            raise ScenarioError(f"{pointer}/{key}", "missing required [x, y]")
        return None
    v = data[key]
    if (not isinstance(v, list) or len(v) != 2
            or not all(isinstance(x, (int, float)) for x in v)):
        raise ScenarioError(f"{pointer}/{key}", "expected [x, y]")
    return [float(x) for x in v]


def _bool(data, key, default):
    v = data.get(key, default)
    if not isinstance(v, bool):
        raise ScenarioError(f"/{key}", "expected a boolean")
    return v
