"""Obstacle avoidance straight from sampled surface points (range scans).

No clustering, no shape estimation: every point contributes a distance-scaled
pull on a single aggregate reference direction, and trigonometric eigenvalues
shaped by that aggregate's magnitude do the rest. The aggregate is scaled so
a flat wall sampled at the gap distance saturates it to exactly 1, which is
what keeps the field non-vanishing outside the gap.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContactError
from .frames import basis_matrix, modulate_velocity
from .obstacles import AgentConfig


@dataclass
class ScanPointSet:
    """A timestamped batch of surface sample points.

    points:    (N, d) world-frame positions in meters
    timestamp: acquisition time in seconds
    delta:     angular increment between neighboring beams (radians)
    """

    points: np.ndarray
    timestamp: float = 0.0
    delta: float = 7e-3

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.size == 0:
            self.points = self.points.reshape(0, 2)
        if self.delta <= 0:
            raise ValueError("sampling angle delta must be > 0")

    def __len__(self):
        return self.points.shape[0]

    @classmethod
    def empty(cls, delta: float = 7e-3, timestamp: float = 0.0, dim: int = 2):
        return cls(points=np.empty((0, dim)), timestamp=timestamp, delta=delta)

    @classmethod
    def from_ranges(cls, angles, ranges, pose=(0.0, 0.0, 0.0),
                    max_range=np.inf, delta=None, timestamp=0.0):
        """Convert polar beams to world points; beams at/over max range drop."""
        angles = np.asarray(angles, dtype=float)
        ranges = np.asarray(ranges, dtype=float)
        keep = np.isfinite(ranges) & (ranges < max_range)
        angles, ranges = angles[keep], ranges[keep]
        x, y, theta = pose
        pts = np.stack([x + ranges * np.cos(theta + angles),
                        y + ranges * np.sin(theta + angles)], axis=1)
        if delta is None:
            delta = float(np.min(np.diff(np.sort(angles)))) if len(angles) > 1 else 7e-3
        return cls(points=pts, timestamp=timestamp, delta=delta)


def load_scan(csv_path) -> ScanPointSet:
    """Read a scan from `angle_rad,range_m` CSV plus its JSON metadata sidecar.

    The sidecar lives next to the CSV with a `.json` suffix and must provide
    `delta`, `fov`, `max_range` and `pose`.
    """
    csv_path = Path(csv_path)
    sidecar = csv_path.with_suffix(".json")
    if not sidecar.exists():
        raise FileNotFoundError(f"missing metadata sidecar {sidecar}")
    meta = json.loads(sidecar.read_text())
    angles, ranges = [], []
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            angles.append(float(row["angle_rad"]))
            ranges.append(float(row["range_m"]))
    return ScanPointSet.from_ranges(
        angles, ranges, pose=meta["pose"], max_range=meta["max_range"],
        delta=meta["delta"])


def save_scan(csv_path, angles, ranges, meta: dict) -> None:
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["angle_rad", "range_m"])
        for a, r in zip(angles, ranges):
            writer.writerow([f"{a:.9g}", f"{r:.9g}"])
    csv_path.with_suffix(".json").write_text(json.dumps(meta, indent=1))


def point_reference_and_distance(xi, points, radius):
    """Unit directions agent->point and free distances beyond the body radius.

    Raises ContactError (with the offending indices) if any point touches or
    penetrates the body.
    """
    xi = np.asarray(xi, dtype=float)
    pts = np.atleast_2d(points)
    delta = pts - xi
    dist = np.sqrt(np.einsum("ij,ij->i", delta, delta))
    free = dist - radius
    bad = np.flatnonzero(free <= 0.0)
    if bad.size:
        raise ContactError(bad.tolist())
    return delta / dist[:, None], free


def weight_normalization(config: AgentConfig, delta: float) -> float:
    """Aggregate scale: saturates a wall at the gap distance to magnitude 1."""
    return config.gap_distance * delta / (2.0 * config.distance_scaling)


def aggregated_reference(xi, scan: ScanPointSet, config: AgentConfig) -> np.ndarray:
    """Distance-weighted sum of point directions, wall-normalized.

    Magnitude -> 0 far from everything, 1 at a gap-distance wall, and grows
    without bound toward contact.
    """
    if len(scan) == 0:
        return np.zeros(scan.points.shape[1])
    xi = np.asarray(xi, dtype=float)
    offs = scan.points - xi
    dist = np.sqrt(np.einsum("ij,ij->i", offs, offs))
    free = dist - config.radius
    bad = np.flatnonzero(free <= 0.0)
    if bad.size:
        raise ContactError(bad.tolist())
    w_norm = weight_normalization(config, scan.delta)
    # fold the per-point unit normalization into the weight: w/dist scales
    # the raw offsets directly
    scale = (w_norm * config.distance_scaling) / (free * dist)
    return offs.T @ scale


@dataclass
class SampledFrame:
    r_hat: np.ndarray
    r: np.ndarray
    lambda_r: float
    lambda_e: float

    @property
    def basis(self) -> np.ndarray:
        return basis_matrix(self.r, self.r)


def eigenvalue_reference_sampled(r_hat, v) -> float:
    """Radial stretching from the aggregate magnitude.

    Crosses zero when the magnitude hits 1, saturates at -1 (full reflection)
    at 2; retreating motion close to the points gets the sign flipped back so
    leaving is never blocked.
    """
    r_hat = np.asarray(r_hat, dtype=float)
    mag = float(np.linalg.norm(r_hat))
    lam0 = float(np.cos(0.5 * np.pi * mag)) if mag < 2.0 else -1.0
    if mag > 1.0:
        moving_away = float(r_hat @ np.asarray(v, float)) < 0.0
        if moving_away:
            return -lam0
    return lam0


def eigenvalue_tangent_sampled(r_hat_norm: float) -> float:
    """Tangent stretching: peaks at 2 when the magnitude hits 1 and decays to
    0 toward contact; C1 at the branch junction."""
    if r_hat_norm < 1.0:
        return 1.0 + float(np.sin(0.5 * np.pi * r_hat_norm))
    return 2.0 * float(np.sin(0.5 * np.pi / r_hat_norm))


def sampled_frame(xi, scan: ScanPointSet, config: AgentConfig, v_nominal):
    """Aggregate frame for a scan, or None when the scan has no influence."""
    r_hat = aggregated_reference(xi, scan, config)
    mag = float(np.linalg.norm(r_hat))
    if mag < 1e-15:
        return None
    lam_r = eigenvalue_reference_sampled(r_hat, v_nominal)
    lam_e = eigenvalue_tangent_sampled(mag)
    return SampledFrame(r_hat=r_hat, r=r_hat / mag, lambda_r=lam_r, lambda_e=lam_e)


def modulate_sampled(xi, v_nominal, scan: ScanPointSet,
                     config: AgentConfig) -> np.ndarray:
    """Deflect the nominal velocity using raw scan points only.

    The frame is orthonormal (the point-cloud normal coincides with the
    aggregate direction), so the identity-at-zero limit is exact.
    """
    v_nominal = np.asarray(v_nominal, dtype=float)
    frame = sampled_frame(xi, scan, config, v_nominal)
    if frame is None:
        return v_nominal.copy()
    return modulate_velocity(v_nominal, frame.r, frame.r,
                             frame.lambda_r, frame.lambda_e)


def missed_edge_margin(delta: float, phi_min: float) -> float:
    """Extra body-radius ratio covering corners that fall between beams.

    First term accounts for an obstacle corner of opening angle phi_min
    slipping between two beams, second for the agent's own curvature.
    """
    if delta < 0 or not 0 < phi_min < np.pi:
        raise ValueError("need delta >= 0 and 0 < phi_min < pi")
    return float(np.sin(delta / 2) / np.tan(phi_min / 2) + (1 - np.cos(delta / 2)))


def curvature_safe(r_obstacle: float, r_robot: float,
                   delta: float, phi_min: float) -> bool:
    """True when an obstacle's curvature radius is large enough to be
    resolved safely by beams delta apart."""
    return r_obstacle / r_robot > float(np.sin(delta / 2) / np.cos(phi_min / 2))
