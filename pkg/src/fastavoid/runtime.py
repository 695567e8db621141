"""Asynchronous shared-control runtime.

Three producer channels (range scans, analytic obstacle sets, nominal
commands) feed latest-value mailboxes at their own rates; a fixed-rate
stepper reads whatever is newest, modulates, and maps the result into
linear/angular commands for a differential-drive base whose control point
sits ahead of the wheel axle.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import ContactError, InsideObstacleError, StaleWriteError
from .fusion import modulate_mixed
from .obstacles import AgentConfig, inflate
from .sampled import ScanPointSet


@dataclass(frozen=True)
class StalenessLimits:
    """Per-channel ages (seconds) beyond which a payload is ignored."""
    scan: float = 0.25
    obstacles: float = 2.0
    nominal: float = 0.25


class _Channel:
    __slots__ = ("value", "timestamp")

    def __init__(self):
        self.value = None
        self.timestamp = -math.inf

    def push(self, value, timestamp):
        if timestamp < self.timestamp:
            raise StaleWriteError(
                f"stale-write: t={timestamp} older than held t={self.timestamp}")
        self.value = value
        self.timestamp = float(timestamp)

    def read(self, now, limit):
        if self.value is None or now - self.timestamp > limit:
            return None
        return self.value


class SensorMailbox:
    """Latest-value registers for the three input channels.

    Writes are atomic with respect to reads; per-channel timestamps must be
    monotone (older payloads are rejected with a stale-write error).
    """

    def __init__(self, limits: StalenessLimits | None = None):
        self.limits = limits or StalenessLimits()
        self._scan = _Channel()
        self._obstacles = _Channel()
        self._nominal = _Channel()
        self._lock = threading.Lock()

    def push_scan(self, scan: ScanPointSet, timestamp: float) -> None:
        with self._lock:
            self._scan.push(scan, timestamp)

    def push_obstacles(self, obstacles, timestamp: float) -> None:
        with self._lock:
            self._obstacles.push(list(obstacles), timestamp)

    def push_nominal(self, v_nominal, timestamp: float) -> None:
        with self._lock:
            self._nominal.push(np.asarray(v_nominal, dtype=float), timestamp)

    def snapshot(self, now: float):
        """(scan | None, obstacles list, nominal | None) applying staleness."""
        with self._lock:
            scan = self._scan.read(now, self.limits.scan)
            obstacles = self._obstacles.read(now, self.limits.obstacles) or []
            nominal = self._nominal.read(now, self.limits.nominal)
        return scan, obstacles, nominal


@dataclass
class ControlTick:
    """One output of the fixed-rate control step."""
    time: float
    pose: np.ndarray            # (x, y, theta) of the wheel axle
    xi: np.ndarray              # evaluated control point
    v_nominal: np.ndarray
    xi_dot: np.ndarray          # modulated world-frame velocity at xi
    linear_cmd: float
    angular_cmd: float
    delta_c: float              # relative controller contribution
    d_min: float                # mean distance of the 10 closest scan points
    collision: bool = False
    stale_nominal: bool = False


def control_point(pose, offset: float) -> np.ndarray:
    x, y, theta = pose
    return np.array([x + offset * math.cos(theta), y + offset * math.sin(theta)])


def commands_from_velocity(xi_dot, heading: float, offset: float):
    """Split a world-frame control-point velocity into (linear, angular).

    The control point sits `offset` ahead of the axle, so in the body frame
    the map is diag(1, offset); its inverse is applied here.
    """
    c, s = math.cos(heading), math.sin(heading)
    bx = c * xi_dot[0] + s * xi_dot[1]
    by = -s * xi_dot[0] + c * xi_dot[1]
    return bx, by / offset


def velocity_from_commands(linear: float, angular: float,
                           heading: float, offset: float) -> np.ndarray:
    """Forward map of commands_from_velocity (kept for round-trip checks)."""
    bx, by = linear, angular * offset
    c, s = math.cos(heading), math.sin(heading)
    return np.array([c * bx - s * by, s * bx + c * by])


def control_contribution(xi_dot, v_nominal) -> float:
    v = float(np.linalg.norm(v_nominal))
    diff = float(np.linalg.norm(np.asarray(xi_dot) - np.asarray(v_nominal)))
    if v == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / v


def closest_distance(xi, scan, radius: float, k: int = 10) -> float:
    """Mean free distance of the k closest scan points (inf when no scan)."""
    if scan is None or len(scan) == 0:
        return math.inf
    offs = scan.points - np.asarray(xi, float)
    dist = np.sqrt(np.einsum("ij,ij->i", offs, offs)) - radius
    k = min(k, len(dist))
    return float(np.mean(np.partition(dist, k - 1)[:k]))


class Controller:
    """Fixed-rate stepper over a SensorMailbox.

    step() is pure with respect to the mailbox contents: identical push/step
    schedules produce identical tick streams.
    """

    def __init__(self, config: AgentConfig, limits: StalenessLimits | None = None):
        if config.control_point_offset <= 0:
            raise ValueError("control_point_offset must be > 0 for the "
                             "command split to be invertible")
        self.config = config
        self.mailbox = SensorMailbox(limits)

    # channel passthroughs
    def push_scan(self, scan, timestamp):
        self.mailbox.push_scan(scan, timestamp)

    def push_obstacles(self, obstacles, timestamp):
        # modulation works on body-inflated copies so the whole disc stays
        # clear, not just the control point
        self.mailbox.push_obstacles(
            [inflate(o, self.config.radius) for o in obstacles], timestamp)

    def push_nominal(self, v_nominal, timestamp):
        self.mailbox.push_nominal(v_nominal, timestamp)

    def step(self, pose, t: float) -> ControlTick:
        pose = np.asarray(pose, dtype=float)
        xi = control_point(pose, self.config.control_point_offset)
        scan, obstacles, nominal = self.mailbox.snapshot(t)
        d_min = closest_distance(xi, scan, self.config.radius)
        if nominal is None:
            return self._tick(t, pose, xi, np.zeros(2), np.zeros(2), d_min,
                              stale_nominal=True)
        try:
            xi_dot = modulate_mixed(xi, nominal, scan, obstacles, self.config)
        except (ContactError, InsideObstacleError):
            return self._tick(t, pose, xi, nominal, np.zeros(2), d_min,
                              collision=True)
        return self._tick(t, pose, xi, nominal, xi_dot, d_min)

    def _tick(self, t, pose, xi, nominal, xi_dot, d_min,
              collision=False, stale_nominal=False) -> ControlTick:
        lin, ang = commands_from_velocity(xi_dot, pose[2],
                                          self.config.control_point_offset)
        return ControlTick(
            time=t, pose=pose, xi=xi, v_nominal=nominal, xi_dot=xi_dot,
            linear_cmd=lin, angular_cmd=ang,
            delta_c=control_contribution(xi_dot, nominal),
            d_min=d_min, collision=collision, stale_nominal=stale_nominal)
