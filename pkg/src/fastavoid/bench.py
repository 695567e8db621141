"""Timing harness and the per-obstacle baseline it is compared against.

The baseline modulates once per obstacle and averages the resulting
velocities (magnitude and direction separately, so opposing deflections do
not cancel); the fast path builds a single aggregate frame. Both are linear
in the obstacle count, the baseline with the steeper slope.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .analytic import (WEIGHT_EPS, ModulationFrame, _normalize_weights,
                       eigenvalues, modulate_analytic, summed_normal)
from .frames import modulate_velocity
from .obstacles import AgentConfig, Circle
from .sampled import ScanPointSet, modulate_sampled


def baseline_modulate(xi, v_nominal, obstacles, config: AgentConfig) -> np.ndarray:
    """Per-obstacle modulation, then a weighted average of the results.

    Magnitudes and directions are averaged separately; a single obstacle
    reduces exactly to the aggregate method.
    """
    xi = np.asarray(xi, dtype=float)
    v_nominal = np.asarray(v_nominal, dtype=float)
    if not obstacles:
        return v_nominal.copy()
    n = len(obstacles)
    raw = np.empty(n)
    velocities = np.empty((n, xi.size))
    for i, obs in enumerate(obstacles):
        gamma, ref, normal = obs.evaluate(xi)
        if gamma <= 1.0:
            from .errors import InsideObstacleError
            raise InsideObstacleError(gamma=gamma, obstacle_index=i)
        raw[i] = (config.distance_scaling / (gamma - 1.0)) ** config.scaling_potential
        w = min(raw[i], 1.0)
        n_hat, n_unit, _ = summed_normal([w], [normal], [ref], ref)
        lam_r, lam_e = eigenvalues(w, config.reactivity)
        velocities[i] = modulate_velocity(v_nominal, ref, n_unit, lam_r, lam_e)
    if float(np.max(raw)) <= WEIGHT_EPS:
        return v_nominal.copy()
    weights = _normalize_weights(raw).normalized
    weights = weights / np.sum(weights)
    mags = np.linalg.norm(velocities, axis=1)
    mean_mag = float(weights @ mags)
    safe = np.where(mags > 1e-12, mags, 1.0)
    directions = velocities / safe[:, None]
    mean_dir = weights @ directions
    dn = float(np.linalg.norm(mean_dir))
    if dn < 1e-12:
        return np.zeros_like(v_nominal)
    return mean_mag * mean_dir / dn


@dataclass
class BenchRow:
    path: str
    n: int
    median_s: float
    p95_s: float
    repetitions: int


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)   # path -> (slope s/item, r2)

    def to_dict(self):
        return {
            "rows": [vars(r) for r in self.rows],
            "fits": {k: {"slope_s_per_item": v[0], "r_squared": v[1]}
                     for k, v in self.fits.items()},
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["path", "n", "median_s", "p95_s", "repetitions"])
        for r in self.rows:
            w.writerow([r.path, r.n, f"{r.median_s:.6e}", f"{r.p95_s:.6e}",
                        r.repetitions])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def format_table(self) -> str:
        lines = [f"{'path':16s} {'N':>7s} {'median':>12s} {'p95':>12s}"]
        for r in self.rows:
            lines.append(f"{r.path:16s} {r.n:7d} {r.median_s*1e3:9.3f} ms "
                         f"{r.p95_s*1e3:9.3f} ms")
        for path, (slope, r2) in self.fits.items():
            lines.append(f"fit {path:14s} slope {slope*1e6:8.3f} us/item  "
                         f"R^2 {r2:.4f}")
        return "\n".join(lines)


DEFAULT_SIZES = (10, 100, 1000, 10_000, 30_000)


def _bench_scene(n, seed, spread=400.0):
    """n unit-ish circles scattered far enough that the agent stays exterior."""
    rng = np.random.default_rng(seed)
    radii = rng.uniform(0.2, 0.4, n)
    angles = rng.uniform(0, 2 * np.pi, n)
    dists = rng.uniform(5.0, spread, n)
    centers = np.stack([dists * np.cos(angles), dists * np.sin(angles)], axis=1)
    return [Circle(r, center=c) for r, c in zip(radii, centers)]


def _bench_points(n, seed, spread=40.0):
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0, 2 * np.pi, n)
    dists = rng.uniform(2.0, spread, n)
    return ScanPointSet(
        points=np.stack([dists * np.cos(angles), dists * np.sin(angles)], axis=1),
        delta=2 * np.pi / max(n, 8))


def _time_call(fn, repetitions):
    samples = []
    sink = 0.0
    for _ in range(repetitions):
        t0 = time.perf_counter()
        out = fn()
        t1 = time.perf_counter()
        sink += float(out[0])
        samples.append(t1 - t0)
    arr = np.sort(np.asarray(samples))
    return float(np.median(arr)), float(arr[min(len(arr) - 1,
                                                int(0.95 * len(arr)))]), sink


def _linear_fit(ns, ts):
    ns = np.asarray(ns, dtype=float)
    ts = np.asarray(ts, dtype=float)
    A = np.stack([ns, np.ones_like(ns)], axis=1)
    coef, *_ = np.linalg.lstsq(A, ts, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ts - pred) ** 2))
    ss_tot = float(np.sum((ts - np.mean(ts)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2


def _reps_for(n, repetitions):
    return max(3, min(repetitions, int(repetitions * 200 / max(n, 1))))


def run_benchmarks(sizes=DEFAULT_SIZES, repetitions: int = 25,
                   seed: int = 0) -> BenchReport:
    """Median/p95 wall times of the three evaluation paths over input size.

    Scene construction happens outside the timed region; a same-input
    re-evaluation is compared against the recorded result before timing each
    configuration so the work cannot be skipped.
    """
    config = AgentConfig()
    xi = np.zeros(2)
    v = np.array([1.0, 0.0])
    report = BenchReport()
    series = {"fast-analytic": ([], []), "baseline-analytic": ([], []),
              "sampled": ([], [])}

    for n in sizes:
        obstacles = _bench_scene(n, seed)
        scan = _bench_points(n, seed + 1)

        first_fast = modulate_analytic(xi, v, obstacles, config)
        assert np.array_equal(first_fast,
                              modulate_analytic(xi, v, obstacles, config))
        first_base = baseline_modulate(xi, v, obstacles, config)
        assert np.array_equal(first_base,
                              baseline_modulate(xi, v, obstacles, config))
        first_sampled = modulate_sampled(xi, v, scan, config)
        assert np.array_equal(first_sampled,
                              modulate_sampled(xi, v, scan, config))

        for path, fn in (
            ("fast-analytic", lambda: modulate_analytic(xi, v, obstacles, config)),
            ("baseline-analytic", lambda: baseline_modulate(xi, v, obstacles, config)),
            ("sampled", lambda: modulate_sampled(xi, v, scan, config)),
        ):
            reps = _reps_for(n, repetitions)
            median, p95, _ = _time_call(fn, reps)
            report.rows.append(BenchRow(path=path, n=n, median_s=median,
                                        p95_s=p95, repetitions=reps))
            series[path][0].append(n)
            series[path][1].append(median)

    for path, (ns, ts) in series.items():
        if len(ns) >= 2:
            report.fits[path] = _linear_fit(ns, ts)
    return report
