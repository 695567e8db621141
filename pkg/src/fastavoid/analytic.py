"""Single-virtual-obstacle modulation for analytic star worlds.

All obstacles are collapsed into one weighted reference direction and one
weighted normal; a single eigen-stretching in that frame then deflects the
nominal velocity. Cost grows linearly with the obstacle count and only one
frame is ever built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsideObstacleError
from .frames import basis_matrix, modulate_velocity
from .obstacles import AgentConfig

# below this raw weight the whole world is treated as uninfluential and the
# nominal command passes through bit-exact
WEIGHT_EPS = 1e-12

SQRT2 = float(np.sqrt(2.0))


@dataclass
class ObstacleWeights:
    raw: np.ndarray          # w-hat, one per obstacle
    normalized: np.ndarray   # sums to 1 when raw sum exceeds 1, else == raw
    total: float             # raw sum

    @property
    def values(self) -> np.ndarray:
        return self.normalized


@dataclass
class ModulationFrame:
    """Full decomposition at one query point."""
    r_hat: np.ndarray        # averaged reference, |r_hat| <= 1
    r: np.ndarray            # unit reference
    n_offset: np.ndarray     # weighted sum of (normal - reference) offsets
    n: np.ndarray            # unit weighted normal
    c_n: float               # invertibility rescue scaling in [1, sqrt(2)]
    basis: np.ndarray        # [r | tangent basis of n]
    lambda_r: float
    lambda_e: float


def obstacle_weights(obstacles, xi, config: AgentConfig) -> ObstacleWeights:
    """Influence weight of each obstacle from its Gamma distance.

    raw_i = (D_scal / (Gamma_i - 1))^s; raw weights are kept when they sum
    to <= 1 and are normalized to sum 1 otherwise.
    """
    raw = np.empty(len(obstacles))
    for i, obs in enumerate(obstacles):
        g = obs.gamma(xi)
        if g <= 1.0:
            raise InsideObstacleError(gamma=g, obstacle_index=i)
        raw[i] = (config.distance_scaling / (g - 1.0)) ** config.scaling_potential
    return _normalize_weights(raw)


def _normalize_weights(raw: np.ndarray) -> ObstacleWeights:
    total = float(np.sum(raw))
    normalized = raw / total if total > 1.0 else raw.copy()
    return ObstacleWeights(raw=raw, normalized=normalized, total=total)


def averaged_reference(weights: np.ndarray, references: np.ndarray) -> np.ndarray:
    """Weighted sum of unit reference directions; norm stays <= 1."""
    return np.asarray(weights) @ np.asarray(references)


def summed_normal(weights, normals, references, r_unit):
    """Weighted normal with the invertibility rescue.

    Returns (n_hat, n_unit, c_n). The offset sum n_off = sum w_i (n_i - r_i)
    has norm < sqrt(2) in star worlds; when it points too sharply against the
    reference, the reference share is rescaled so <r, n_hat> stays positive.
    """
    weights = np.asarray(weights)
    n_off = weights @ (np.asarray(normals) - np.asarray(references))
    off_norm = float(np.linalg.norm(n_off))
    if off_norm < 1e-15:
        c_n = 1.0
        n_hat = np.asarray(r_unit, float).copy()
    else:
        p_nr = -float(r_unit @ n_off) / off_norm
        c_n = 1.0 if p_nr < SQRT2 / 2.0 else SQRT2 * p_nr
        n_hat = c_n * r_unit + n_off
    n_unit = n_hat / np.linalg.norm(n_hat)
    return n_hat, n_unit, c_n


def eigenvalues(r_hat_norm: float, reactivity: float):
    """Stretching factors: radial shrinks to 0 and tangent grows to 2 as the
    averaged reference saturates."""
    m = r_hat_norm ** reactivity
    return 1.0 - m, 1.0 + m


def tail_eigenvalues(lambda_r, lambda_e, r_hat, r_unit, v_nominal, power_weight):
    """Blend the eigenvalues back toward identity in an obstacle's wake.

    Active only when the nominal command already points away from the
    aggregate obstacle direction; the blend strength follows the alignment
    raised to a small power so it engages smoothly.
    """
    v_norm = float(np.linalg.norm(v_nominal))
    if v_norm == 0.0:
        return lambda_r, lambda_e
    r_hat_norm = float(np.linalg.norm(r_hat))
    w_r = 1.0 if r_hat_norm <= 1.0 else 1.0 / r_hat_norm
    align = float(r_unit @ v_nominal) / v_norm
    w_v = max(0.0, align) ** power_weight
    lam_e_t = w_r * w_v + (1.0 - w_r * w_v) * lambda_e
    sgn = 1.0 if w_v > 0.0 else 0.0
    lam_r_t = lam_e_t * w_r * sgn + (1.0 - w_r * sgn) * lambda_r
    return lam_r_t, lam_e_t


C_MIN = 1e-5


def decreasing_tail_weight(raw_weights, references, v_nominal) -> np.ndarray:
    """Shrink the raw weight of obstacles lying in the wake of the command.

    Each weight is multiplied by its own share of the raw sum raised to
    1/c_i, where c_i -> 0 for obstacles straight behind the motion (share^inf
    -> 0) and c_i = 2 for obstacles dead ahead (mild shrink).
    """
    raw = np.asarray(raw_weights, dtype=float)
    v_norm = float(np.linalg.norm(v_nominal))
    total = float(np.sum(raw))
    if v_norm == 0.0 or total <= 0.0:
        return raw.copy()
    refs = np.asarray(references)
    align = (refs @ np.asarray(v_nominal)) / v_norm
    c = np.maximum(1.0 - align, C_MIN)
    share = raw / total
    return raw * share ** (1.0 / c)


def analytic_frame(obstacles, xi, config: AgentConfig,
                   v_nominal=None, tail: bool = True):
    """Build the virtual-obstacle frame at xi, or None when nothing matters.

    None is returned when every raw weight is below WEIGHT_EPS or the
    weighted references cancel exactly; callers then pass the nominal
    command through unchanged.
    """
    xi = np.asarray(xi, dtype=float)
    if not obstacles:
        return None
    gammas = np.empty(len(obstacles))
    refs = np.empty((len(obstacles), xi.size))
    normals = np.empty_like(refs)
    for i, obs in enumerate(obstacles):
        g, refs[i], normals[i] = obs.evaluate(xi)
        if g <= 1.0:
            raise InsideObstacleError(gamma=g, obstacle_index=i)
        gammas[i] = g
    raw = (config.distance_scaling / (gammas - 1.0)) ** config.scaling_potential
    if tail and v_nominal is not None and float(np.linalg.norm(v_nominal)) > 0.0:
        raw = decreasing_tail_weight(raw, refs, v_nominal)
    if float(np.max(raw)) <= WEIGHT_EPS:
        return None
    weights = _normalize_weights(raw).normalized
    r_hat = averaged_reference(weights, refs)
    r_hat_norm = float(np.linalg.norm(r_hat))
    if r_hat_norm < 1e-12:
        return None
    r_unit = r_hat / r_hat_norm
    n_hat, n_unit, c_n = summed_normal(weights, normals, refs, r_unit)
    lam_r, lam_e = eigenvalues(min(r_hat_norm, 1.0), config.reactivity)
    if tail and v_nominal is not None:
        lam_r, lam_e = tail_eigenvalues(lam_r, lam_e, r_hat, r_unit,
                                        v_nominal, config.power_weight)
    return ModulationFrame(
        r_hat=r_hat, r=r_unit, n_offset=n_hat - c_n * r_unit, n=n_unit,
        c_n=c_n, basis=basis_matrix(r_unit, n_unit),
        lambda_r=lam_r, lambda_e=lam_e,
    )


def modulate_analytic(xi, v_nominal, obstacles, config: AgentConfig,
                      tail: bool = True) -> np.ndarray:
    """Deflect the nominal velocity around every analytic obstacle at once."""
    v_nominal = np.asarray(v_nominal, dtype=float)
    frame = analytic_frame(obstacles, xi, config, v_nominal, tail)
    if frame is None:
        return v_nominal.copy()
    return modulate_velocity(v_nominal, frame.r, frame.n,
                             frame.lambda_r, frame.lambda_e)
