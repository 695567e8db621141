"""Deterministic 2D world: scan synthesis, rollouts, convergence experiment.

Everything is a pure function of (scenario content, seed): scans are ray-cast
analytically against the true obstacle surfaces, integration uses fixed-step
RK4 or Euler, outcomes are classified from the tick stream.
"""

from __future__ import annotations

import copy
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import modulate_analytic
from .errors import ContactError, InsideObstacleError
from .fusion import modulate_mixed, prune_points
from .obstacles import AgentConfig, Ellipse, inflate, rectangle
from .runtime import commands_from_velocity, control_contribution, closest_distance
from .sampled import ScanPointSet, modulate_sampled
from .scenario import ScanSpec, Scenario, IntegratorSpec

CONVERGE_RADIUS = 0.01      # m, distance to the attractor that counts as arrived
STALL_SPEED = 1e-4          # m/s, below this the agent is considered stopped
STALL_HOLD = 2.0            # s, how long the stall must persist
STALL_GOAL_SLACK = 0.05     # m, stalls this close to the goal still converge
CLEARANCE_FLOOR = 0.02      # m, below this the safety push takes over
RECOVER_SPEED = 1.0         # m/s, outward push speed of the safety policy
PROGRESS_WINDOW = 6.0       # s, net displacement window of the stuck detector
PROGRESS_MIN = 0.05         # m, displacement below which the agent is stuck


class GlideObstacle:
    """View of a body-inflated obstacle whose gamma never drops below 1.

    Discrete integration of boundary-tangent flow cuts chords into the
    inflated band (sharpest at offset polygon corners). Clamping gamma keeps
    the field defined there, so the agent glides along instead of erroring
    out; the margin band is a body radius deep and the true-world clearance
    check stays authoritative.
    """

    GAMMA_FLOOR = 1.0 + 1e-9

    def __init__(self, obstacle):
        self.inner = obstacle

    def gamma(self, xi):
        return max(self.inner.gamma(xi), self.GAMMA_FLOOR)

    def gamma_batch(self, points):
        return np.maximum(self.inner.gamma_batch(points), self.GAMMA_FLOOR)

    def evaluate(self, xi):
        gamma, ref, normal = self.inner.evaluate(xi)
        return max(gamma, self.GAMMA_FLOOR), ref, normal

    def reference_direction(self, xi):
        return self.inner.reference_direction(xi)

    def surface_normal(self, xi):
        return self.inner.surface_normal(xi, strict=False)

    def velocity_at(self, xi):
        return self.inner.velocity_at(xi)

    def advance(self, dt):
        self.inner.advance(dt)

    @property
    def center(self):
        return self.inner.center

    @property
    def reference_point(self):
        return self.inner.reference_point

    @property
    def linear_velocity(self):
        return self.inner.linear_velocity

    @property
    def angular_velocity(self):
        return self.inner.angular_velocity


def synthesize_scan(obstacles, pose, spec: ScanSpec, rng=None,
                    timestamp: float = 0.0) -> ScanPointSet:
    """Ray-cast one scan from the pose against the true obstacle surfaces.

    One beam per angle increment across the field of view (relative to the
    pose heading); beams that reach max range are dropped. Optional Gaussian
    range noise is applied before the max-range cut.
    """
    x, y, theta = pose
    origin = np.array([x, y], dtype=float)
    n = max(int(round((spec.fov[1] - spec.fov[0]) / spec.delta)), 1)
    angles = spec.fov[0] + spec.delta * np.arange(n)
    world = theta + angles
    dirs = np.stack([np.cos(world), np.sin(world)], axis=1)
    ranges = np.full(n, np.inf)
    for obs in obstacles:
        ranges = np.minimum(ranges, obs.ray_t_batch(origin, dirs))
    if rng is not None and spec.noise_sigma > 0:
        hit = np.isfinite(ranges)
        ranges = ranges + np.where(hit, rng.normal(0.0, spec.noise_sigma, n), 0.0)
    keep = ranges < spec.max_range
    pts = origin + ranges[keep, None] * dirs[keep]
    return ScanPointSet(points=pts, timestamp=timestamp, delta=spec.delta)


@dataclass
class RolloutResult:
    outcome: str                    # converged | local-minimum | collision | timeout
    time_to_converge: float         # s, nan unless converged
    min_clearance: float            # m, over the whole trajectory
    t: np.ndarray
    states: np.ndarray              # (n, 3) x, y, theta
    velocities: np.ndarray          # (n, 2) modulated
    commands: np.ndarray            # (n, 2) linear, angular
    delta_c: np.ndarray
    d_min: np.ndarray

    def trajectory_rows(self):
        for i in range(len(self.t)):
            yield (self.t[i], *self.states[i], *self.commands[i],
                   self.delta_c[i], self.d_min[i])


def _nominal_velocity(xi, attractor, v_max):
    v = attractor - xi
    speed = float(np.hypot(v[0], v[1]))
    if speed < 1e-12:
        return np.zeros(2)
    return v * (min(v_max, speed) / speed)


def _min_clearance(obstacles, xi, radius, skip_above=0.75):
    """Exact body clearance; far obstacles are skipped via a circumradius
    lower bound to keep the per-tick cost flat."""
    best, _ = _min_clearance_with_nearest(obstacles, xi, radius, skip_above)
    return best


def _min_clearance_with_nearest(obstacles, xi, radius, skip_above=0.75):
    best = math.inf
    nearest = None
    for obs in obstacles:
        lb = float(np.linalg.norm(xi - obs.center)) - _circumradius(obs) - radius
        if lb > skip_above and best > skip_above:
            if lb < best:
                best, nearest = lb, obs
            continue
        d = obs.surface_distance(xi) - radius
        if d < best:
            best, nearest = d, obs
    return best, nearest


def _circumradius(obs):
    r = getattr(obs, "_circumradius", None)
    if r is None:
        if hasattr(obs, "shape_radius"):
            r = obs.shape_radius
        elif hasattr(obs, "semi_axes"):
            r = max(obs.semi_axes)
        else:
            r = float(np.max(np.linalg.norm(obs.vertices, axis=1)))
        obs._circumradius = r
    return r


def rollout(scenario: Scenario, nominal=None) -> RolloutResult:
    """Integrate one trajectory through the scenario.

    `nominal` optionally overrides the attractor dynamics with a callable
    (t, xi) -> velocity; otherwise the clipped linear pull toward the
    attractor is used.
    """
    cfg = scenario.agent
    dt = scenario.integrator.dt
    rk4 = scenario.integrator.scheme == "rk4"
    rng = np.random.default_rng(scenario.seed)
    world = [copy.deepcopy(o) for o in scenario.world_obstacles()]
    # modulation sees body-inflated obstacles so the center-point guarantees
    # cover the whole disc; sensing and collision accounting use the true world
    modul_hard = [inflate(o, cfg.radius) for o in world]
    modul = [GlideObstacle(o) for o in modul_hard]
    n_declared = len(scenario.obstacles)
    tracked_idx = [i for i in range(n_declared) if scenario.tracked[i]]
    moving = any(
        float(np.linalg.norm(o.linear_velocity)) > 0 or o.angular_velocity != 0
        for o in world)

    if nominal is None:
        if scenario.attractor is None:
            raise ValueError("scenario needs an attractor or an explicit "
                             "nominal velocity function")
        attractor = scenario.attractor

        def nominal(t, xi):
            return _nominal_velocity(xi, attractor, scenario.v_max)

    xi = scenario.start[:2].astype(float).copy()
    heading = float(scenario.start[2])
    n_ticks = int(round(scenario.t_max / dt))

    t_arr = np.empty(n_ticks + 1)
    states = np.empty((n_ticks + 1, 3))
    vels = np.zeros((n_ticks + 1, 2))
    cmds = np.zeros((n_ticks + 1, 2))
    dcs = np.zeros(n_ticks + 1)
    dmins = np.full(n_ticks + 1, np.inf)

    outcome = "timeout"
    time_to_converge = math.nan
    min_clear = math.inf
    stall_since = None
    pushing = None
    count = 0
    progress_window = max(int(round(PROGRESS_WINDOW / dt)), 1)
    anchor = xi.copy()
    anchor_tick = 0

    for k in range(n_ticks + 1):
        t = k * dt
        scan = None
        if scenario.mode != "analytic":
            scan = synthesize_scan(world, (xi[0], xi[1], heading), scenario.scan,
                                   rng=rng, timestamp=t)
        analytic_obs = (modul[:n_declared] if scenario.mode == "analytic"
                        else [modul[i] for i in tracked_idx])
        if scenario.mode == "mixed" and scan is not None and tracked_idx:
            scan = prune_points(scan, [modul_hard[i] for i in tracked_idx])

        def field_velocity(pos, fallback=None):
            # fallback covers integrator probe points that poke into the
            # (conservatively inflated) no-go region; the trajectory point
            # itself has no fallback
            vn = nominal(t, pos)
            try:
                if scenario.mode == "analytic":
                    return modulate_analytic(pos, vn, analytic_obs, cfg,
                                             tail=scenario.tail)
                if scenario.mode == "sampled":
                    return modulate_sampled(pos, vn, scan, cfg)
                return modulate_mixed(pos, vn, scan, analytic_obs, cfg,
                                      prune=False)
            except (ContactError, InsideObstacleError):
                if fallback is None:
                    raise
                return fallback

        clear, nearest = _min_clearance_with_nearest(world, xi, cfg.radius)
        min_clear = min(min_clear, clear)

        # safety policy: below the clearance floor, push straight out and
        # keep pushing (hysteresis) until clear of the release level, so the
        # outward motion cannot be ratcheted back by inward field steps; the
        # push target re-evaluates to the nearest obstacle every tick
        floor = max(CLEARANCE_FLOOR, 2.5 * scenario.v_max * dt)
        if pushing is not None and clear >= 2.0 * floor:
            pushing = None
        if clear < floor or pushing is not None:
            pushing = nearest
        if pushing is None and clear < cfg.radius + 0.35:
            worst_g = 1.0
            for ob in modul_hard:
                g = ob.gamma(xi)
                if g < worst_g:
                    worst_g, pushing = g, ob

        if pushing is not None:
            v = pushing.reference_direction(xi) * RECOVER_SPEED
            step = v
        else:
            try:
                v = field_velocity(xi)
                if rk4:
                    k1 = v
                    k2 = field_velocity(xi + 0.5 * dt * k1, fallback=k1)
                    k3 = field_velocity(xi + 0.5 * dt * k2, fallback=k1)
                    k4 = field_velocity(xi + dt * k3, fallback=k1)
                    step = (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
                else:
                    step = v
            except (ContactError, InsideObstacleError):
                # field undefined at the trajectory point: freeze; the true
                # clearance check decides whether this is a collision
                v = np.zeros(2)
                step = v

        speed = float(np.hypot(v[0], v[1]))
        if speed > 1e-9:
            heading = math.atan2(v[1], v[0])
        lin, ang = commands_from_velocity(v, heading, cfg.control_point_offset)

        t_arr[k] = t
        states[k] = (xi[0], xi[1], heading)
        vels[k] = v
        cmds[k] = (lin, ang)
        dcs[k] = control_contribution(v, nominal(t, xi))
        dmins[k] = closest_distance(xi, scan, cfg.radius) if scan is not None else clear
        count = k

        if clear < 0:
            outcome = "collision"
            break
        if scenario.attractor is not None:
            goal_dist = float(np.linalg.norm(xi - scenario.attractor))
            if goal_dist < CONVERGE_RADIUS:
                outcome = "converged"
                time_to_converge = t
                break
            if speed < STALL_SPEED and goal_dist > STALL_GOAL_SLACK:
                if stall_since is None:
                    stall_since = t
                elif t - stall_since >= STALL_HOLD:
                    outcome = "local-minimum"
                    break
            else:
                stall_since = None
            # slow orbiting/chattering around an equilibrium counts too:
            # negligible net displacement over a whole window
            if k - anchor_tick >= progress_window:
                if (float(np.hypot(*(xi - anchor))) < PROGRESS_MIN
                        and goal_dist > STALL_GOAL_SLACK):
                    outcome = "local-minimum"
                    break
                anchor = xi.copy()
                anchor_tick = k

        xi = xi + dt * step
        if moving:
            for obs in world:
                obs.advance(dt)
            for obs in modul_hard:
                obs.advance(dt)

    n = count + 1
    return RolloutResult(
        outcome=outcome, time_to_converge=time_to_converge,
        min_clearance=min_clear, t=t_arr[:n], states=states[:n],
        velocities=vels[:n], commands=cmds[:n], delta_c=dcs[:n],
        d_min=dmins[:n])


# ---------------------------------------------------------------------------
# Random worlds and the convergence experiment


def random_star_world(rng, n_obstacles, bounds=(-4.0, 4.0), moving=False):
    """Random mixture of circles, ellipses and boxes inside the bounds."""
    out = []
    lo, hi = bounds
    for _ in range(n_obstacles):
        kind = rng.integers(0, 3)
        center = rng.uniform(lo, hi, 2)
        if kind == 0:
            obs = _rng_circle(rng, center)
        elif kind == 1:
            obs = _rng_ellipse(rng, center)
        else:
            obs = rectangle(rng.uniform(0.4, 1.4), rng.uniform(0.4, 1.4),
                            center=center, orientation=rng.uniform(0, math.pi))
        if moving:
            obs.linear_velocity = rng.uniform(-0.3, 0.3, 2)
        out.append(obs)
    return out


def _rng_circle(rng, center):
    from .obstacles import Circle
    return Circle(rng.uniform(0.25, 0.8), center=center)


def _rng_ellipse(rng, center):
    return Ellipse((rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2)),
                   center=center, orientation=rng.uniform(0, math.pi))


def free_point(rng, obstacles, config, bounds, clearance=0.2, tries=200):
    """Rejection-sample a point with positive body clearance to everything."""
    lo, hi = bounds
    for _ in range(tries):
        p = rng.uniform(lo, hi, 2)
        if _min_clearance(obstacles, p, config.radius) > clearance:
            return p
    raise RuntimeError("could not place a free point in the world")


@dataclass
class ExperimentReport:
    """Convergence comparison between scan-only and disparate perception."""
    n_runs: int
    converged_sampled: int
    converged_disparate: int
    mean_time_sampled: float      # over jointly converged runs
    mean_time_disparate: float
    outcomes: list = field(default_factory=list)

    @property
    def ratio_sampled(self) -> float:
        return self.converged_sampled / self.n_runs if self.n_runs else math.nan

    @property
    def ratio_disparate(self) -> float:
        return self.converged_disparate / self.n_runs if self.n_runs else math.nan

    def to_dict(self):
        return {
            "n_runs": self.n_runs,
            "convergence_ratio": {"sampled": self.ratio_sampled,
                                  "disparate": self.ratio_disparate},
            "mean_time_to_converge": {"sampled": self.mean_time_sampled,
                                      "disparate": self.mean_time_disparate},
            "outcomes": self.outcomes,
        }

    def format_table(self) -> str:
        lines = [
            "                    Sampled    Disparate",
            f"Convergence ratio   {self.ratio_sampled:7.0%}    {self.ratio_disparate:9.0%}",
            f"Average time [s]    {self.mean_time_sampled:7.1f}    {self.mean_time_disparate:9.1f}",
            f"({self.n_runs} runs; averages over jointly converged runs)",
        ]
        return "\n".join(lines)


ROOM = (-5.0, -5.0, 5.0, 5.0)
SQUARE_SIDE = 1.4
SQUARE_CENTERS = ((1.0, 0.95), (1.0, -0.45))   # flush pair: one wide flat face
ELLIPSE_BOXES = (((1.6, 3.6), (1.8, 3.6)), ((-3.6, -1.6), (-3.6, -1.8)))
MIN_GAP = 1.35   # smallest free gap kept between an ellipse and anything fixed
START_X = -4.2
ATTRACTOR = (3.8, 0.25)


def comparison_scene(seed: int) -> Scenario:
    """One randomized room: two fixed flush squares forming a wide flat
    barrier in front of the attractor, random ellipses in the top-right and
    bottom-left quadrants (rejection sampled so gaps stay passable and the
    start/goal stay free), a surrounding wall, start on the left edge at a
    random height.

    The wide face traps scan-guided approaches: the aggregate direction
    aligns with the pull toward the attractor behind it over a broad band of
    headings, so trajectories brake to a standstill. Known analytically, the
    pair deflects the flow around its ends well before the face."""
    rng = np.random.default_rng(seed)
    squares = [
        rectangle(SQUARE_SIDE, SQUARE_SIDE, center=SQUARE_CENTERS[0]),
        rectangle(SQUARE_SIDE, SQUARE_SIDE, center=SQUARE_CENTERS[1]),
    ]
    obstacles = list(squares)
    tracked = [True, True]
    square_reach = SQUARE_SIDE / 2 * math.sqrt(2.0)
    start = np.array([START_X, rng.uniform(-4.4, 3.0), 0.0])
    attractor = np.array(ATTRACTOR)
    for (xr, yr) in ELLIPSE_BOXES:
        for _ in range(300):
            e = _rng_ellipse(rng, np.array([rng.uniform(*xr), rng.uniform(*yr)]))
            reach = max(e.semi_axes)
            wall_ok = (min(e.center[0] - ROOM[0], ROOM[2] - e.center[0],
                           e.center[1] - ROOM[1], ROOM[3] - e.center[1])
                       - reach >= MIN_GAP)
            sq_ok = all(
                float(np.linalg.norm(e.center - s.center))
                >= reach + square_reach + MIN_GAP for s in squares)
            free_ok = (float(np.linalg.norm(e.center - start[:2])) >= reach + 1.0
                       and float(np.linalg.norm(e.center - attractor)) >= reach + 1.0)
            if wall_ok and sq_ok and free_ok:
                break
        obstacles.append(e)
        tracked.append(False)
    return Scenario(
        obstacles=obstacles, tracked=tracked, wall=ROOM,
        agent=AgentConfig(radius=0.35, gap_distance=0.5),
        start=start,
        attractor=attractor,
        scan=ScanSpec(delta=2 * math.pi / 360, max_range=25.0),
        integrator=IntegratorSpec(dt=0.02, scheme="euler"),
        seed=seed, mode="sampled", t_max=55.0, v_max=1.0,
    )


def _run_pair(seed: int):
    scn = comparison_scene(seed)
    scn.mode = "sampled"
    rs = rollout(scn)
    scn_d = comparison_scene(seed)
    scn_d.mode = "mixed"
    rd = rollout(scn_d)
    return (rs.outcome, rs.time_to_converge, rd.outcome, rd.time_to_converge)


def convergence_experiment(n_runs: int, seed: int = 0, jobs: int = 1) -> ExperimentReport:
    """Roll the comparison scene twice per run: square obstacles discovered
    only by scanning vs. given analytically."""
    seeds = [seed + i for i in range(n_runs)]
    if jobs > 1 and n_runs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_pair, seeds))
    else:
        rows = [_run_pair(s) for s in seeds]
    conv_s = sum(1 for r in rows if r[0] == "converged")
    conv_d = sum(1 for r in rows if r[2] == "converged")
    joint = [(r[1], r[3]) for r in rows
             if r[0] == "converged" and r[2] == "converged"]
    mean_s = float(np.mean([j[0] for j in joint])) if joint else math.nan
    mean_d = float(np.mean([j[1] for j in joint])) if joint else math.nan
    return ExperimentReport(
        n_runs=n_runs, converged_sampled=conv_s, converged_disparate=conv_d,
        mean_time_sampled=mean_s, mean_time_disparate=mean_d,
        outcomes=[{"seed": s, "sampled": r[0], "disparate": r[2]}
                  for s, r in zip(seeds, rows)])
