"""Fuse raw scan points with analytic obstacle descriptions.

The two information sources arrive at different rates and describe the world
differently; each contributes an aggregate reference whose magnitude encodes
proximity. A pair of importance weights derived from those magnitudes blends
the references into one mixed frame, and analytic obstacle velocities enter
as a weighted transport term so moving obstacles push rather than teleport.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analytic, sampled
from .errors import InsideObstacleError
from .frames import modulate_velocity
from .obstacles import AgentConfig
from .sampled import ScanPointSet

SATURATION_EPS = 1e-9


def prune_points(scan: ScanPointSet, obstacles) -> ScanPointSet:
    """Drop scan points lying inside (or on) any analytic obstacle.

    Keeps points strictly outside every obstacle; a point exactly on a
    boundary is considered explained by the analytic description and dropped.
    """
    if len(scan) == 0 or not obstacles:
        return scan
    keep = np.ones(len(scan), dtype=bool)
    for obs in obstacles:
        keep &= obs.gamma_batch(scan.points) > 1.0
    return ScanPointSet(points=scan.points[keep], timestamp=scan.timestamp,
                        delta=scan.delta)


def fusion_weights(r_hat_p_norm: float, r_hat_o_norm: float):
    """Importance split between sampled and analytic information.

    Each raw weight diverges as its reference magnitude approaches 1,
    so whichever source reports near-contact dominates. Sampled magnitudes
    can exceed 1; from there the sampled source owns the decision outright.
    Returns (0.0, 0.0) when neither source carries any information.
    """
    if r_hat_p_norm <= 0.0 and r_hat_o_norm <= 0.0:
        return 0.0, 0.0
    if r_hat_p_norm >= 1.0:
        return 1.0, 0.0
    w_p = 1.0 / (1.0 - min(r_hat_p_norm, 1.0 - SATURATION_EPS)) - 1.0
    w_o = 1.0 / (1.0 - min(r_hat_o_norm, 1.0 - SATURATION_EPS)) - 1.0
    total = w_p + w_o
    return w_p / total, w_o / total


def mixed_reference(w_p: float, w_o: float, r_hat_p, r_hat_o) -> np.ndarray:
    """Blend the two aggregates into one reference.

    The analytic aggregate points obstacle->agent and is negated here so both
    families share the agent->obstacle convention of the sampled path.
    """
    return w_p * np.asarray(r_hat_p, float) + w_o * (-np.asarray(r_hat_o, float))


@dataclass
class MixedFrame:
    w_p: float                  # sampled importance
    w_o: float                  # analytic importance
    r_m: np.ndarray             # mixed reference (agent->obstacle convention)
    normal: np.ndarray          # frame normal (agent->obstacle side, unit)
    velocity_total: np.ndarray  # weighted average analytic obstacle velocity
    velocity_damped: np.ndarray # w_o-scaled transport term entering the DS

    @property
    def has_information(self) -> bool:
        return bool(self.w_p or self.w_o)


def obstacle_velocity(obstacles, xi, config: AgentConfig) -> np.ndarray:
    """Influence-weighted average rigid-body velocity of analytic obstacles."""
    xi = np.asarray(xi, dtype=float)
    if not obstacles:
        return np.zeros_like(xi)
    weights = analytic.obstacle_weights(obstacles, xi, config).normalized
    vel = np.zeros_like(xi)
    for w, obs in zip(weights, obstacles):
        vel += w * obs.velocity_at(xi)
    return vel


def mixed_frame(xi, scan, obstacles, config: AgentConfig,
                prune: bool = True) -> MixedFrame:
    """Aggregate both sources at xi. Either source may be absent; `prune`
    may be disabled when the caller already pruned the scan.

    The frame normal blends the analytic summed normal with the sampled
    direction using the same importance weights. Point samples carry no
    normal beyond their direction, but analytic shapes do, and discarding it
    lets "tangent" flow cut through corners of non-circular obstacles.
    """
    xi = np.asarray(xi, dtype=float)
    if prune and scan is not None and obstacles:
        scan = prune_points(scan, obstacles)
    if scan is not None and len(scan):
        r_hat_p = sampled.aggregated_reference(xi, scan, config)
    else:
        r_hat_p = np.zeros_like(xi)
    normal_o = None
    if obstacles:
        gammas = np.empty(len(obstacles))
        refs = np.empty((len(obstacles), xi.size))
        normals = np.empty_like(refs)
        for i, obs in enumerate(obstacles):
            g, refs[i], normals[i] = obs.evaluate(xi)
            if g <= 1.0:
                raise InsideObstacleError(gamma=g, obstacle_index=i)
            gammas[i] = g
        raw = ((config.distance_scaling / (gammas - 1.0))
               ** config.scaling_potential)
        weights = analytic._normalize_weights(raw).normalized
        r_hat_o = analytic.averaged_reference(weights, refs)
        o_norm = float(np.linalg.norm(r_hat_o))
        if o_norm > 1e-15:
            _, normal_o, _ = analytic.summed_normal(weights, normals, refs,
                                                    r_hat_o / o_norm)
        vel_tot = np.zeros_like(xi)
        if any(float(np.linalg.norm(o.linear_velocity)) > 0
               or o.angular_velocity != 0 for o in obstacles):
            for w, obs in zip(weights, obstacles):
                vel_tot += w * obs.velocity_at(xi)
    else:
        r_hat_o = np.zeros_like(xi)
        vel_tot = np.zeros_like(xi)
    p_norm = float(np.linalg.norm(r_hat_p))
    o_norm = float(np.linalg.norm(r_hat_o))
    w_p, w_o = fusion_weights(p_norm, o_norm)
    r_m = mixed_reference(w_p, w_o, r_hat_p, r_hat_o)
    normal = _blended_normal(r_m, r_hat_p, normal_o, w_p, w_o)
    return MixedFrame(w_p=w_p, w_o=w_o, r_m=r_m, normal=normal,
                      velocity_total=vel_tot, velocity_damped=w_o * vel_tot)


def _blended_normal(r_m, r_hat_p, normal_o, w_p, w_o):
    """Importance blend of the channel normals, agent->obstacle side.

    Falls back to the mixed reference direction (the pure point-cloud frame)
    when the blend degenerates or would break invertibility.
    """
    r_norm = float(np.linalg.norm(r_m))
    if r_norm < 1e-15:
        return np.zeros_like(r_m)
    r_unit = r_m / r_norm
    if normal_o is None:
        return r_unit
    p_dir = np.zeros_like(r_m)
    p_norm = float(np.linalg.norm(r_hat_p))
    if p_norm > 1e-15:
        p_dir = r_hat_p / p_norm
    blend = w_p * p_dir + w_o * (-np.asarray(normal_o, float))
    b_norm = float(np.linalg.norm(blend))
    if b_norm < 1e-9:
        return r_unit
    blend /= b_norm
    if float(blend @ r_unit) <= 0.1:
        return r_unit
    return blend


def modulate_mixed(xi, v_nominal, scan, obstacles,
                   config: AgentConfig, prune: bool = True) -> np.ndarray:
    """Deflect the nominal velocity using everything currently known.

    Static worlds reduce algebraically to the plain modulation; moving
    analytic obstacles contribute a damped transport velocity that the
    modulation wraps around, so a resting agent still gets pushed out of
    the way.
    """
    xi = np.asarray(xi, dtype=float)
    v_nominal = np.asarray(v_nominal, dtype=float)
    frame = mixed_frame(xi, scan, obstacles, config, prune=prune)
    if not frame.has_information:
        return v_nominal.copy()
    v_rel = v_nominal - frame.velocity_damped
    mag = float(np.linalg.norm(frame.r_m))
    if mag < 1e-15:
        return v_nominal.copy()
    lam_r = sampled.eigenvalue_reference_sampled(frame.r_m, v_rel)
    lam_e = sampled.eigenvalue_tangent_sampled(mag)
    r_unit = frame.r_m / mag
    deflected = modulate_velocity(v_rel, r_unit, frame.normal, lam_r, lam_e)
    return deflected + frame.velocity_damped


def importance_scaling(delta: float, d: int = 2) -> float:
    """Distance scaling that gives one surface-sampled obstacle the same
    aggregate pull as its analytic description (surface sampling variant)."""
    if delta <= 0 or d < 2:
        raise ValueError("need delta > 0 and d >= 2")
    return 2.0 * np.pi / delta ** (d - 1)
