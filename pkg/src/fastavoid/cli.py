"""Batch front door: rollouts, vector-field exports, scan replay,
experiments and benchmarks.

Exit codes of `run`/`replay` mirror the rollout outcome: 0 converged,
2 local minimum, 3 collision, 4 timeout; malformed inputs exit with 64.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import modulate_analytic
from .bench import run_benchmarks
from .errors import (ContactError, GammaSingularityError,
                     InsideObstacleError, ScenarioError)
from .fusion import modulate_mixed, prune_points
from .obstacles import inflate
from .sampled import load_scan, modulate_sampled
from .scenario import Scenario
from .simulator import (GlideObstacle, RolloutResult, convergence_experiment,
                        rollout, synthesize_scan)
from .svg import render_field, render_trajectory

EXIT_CODES = {"converged": 0, "local-minimum": 2, "collision": 3, "timeout": 4}
EX_USAGE = 64

TRAJECTORY_HEADER = "t,x,y,theta,v_cmd_lin,v_cmd_ang,delta_c,d_min"


def _provenance(scenario: Scenario | None, seed) -> str:
    h = scenario.sha256() if scenario is not None else "-"
    return (f"# fastavoid {__version__} seed={seed} scenario_sha256={h}\n")


def _write_trajectory(path: Path, result: RolloutResult,
                      scenario: Scenario | None, seed) -> None:
    with open(path, "w") as fh:
        fh.write(_provenance(scenario, seed))
        fh.write(TRAJECTORY_HEADER + "\n")
        for row in result.trajectory_rows():
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")


def _load_scenario(path, args) -> Scenario:
    scn = Scenario.load(path)
    if getattr(args, "seed", None) is not None:
        scn.seed = args.seed
    if getattr(args, "dt", None) is not None:
        scn.integrator.dt = args.dt
    if getattr(args, "mode", None) is not None:
        scn.mode = args.mode
    if getattr(args, "tail", None) is not None:
        scn.tail = args.tail == "on"
    return scn


def cmd_run(args) -> int:
    try:
        scn = _load_scenario(args.scenario, args)
    except (ScenarioError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_USAGE
    result = rollout(scn)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_trajectory(out / "trajectory.csv", result, scn, scn.seed)
    summary = {
        "outcome": result.outcome,
        "time_to_converge": None if math.isnan(result.time_to_converge)
        else result.time_to_converge,
        "min_clearance": result.min_clearance,
        "ticks": int(len(result.t)),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    svg = render_trajectory(_scene_bounds(scn), result.states,
                            scn.world_obstacles(), scn.attractor,
                            radius=scn.agent.radius)
    (out / "trajectory.svg").write_text(svg)
    if args.json:
        print(json.dumps(summary))
    else:
        print(f"outcome: {result.outcome}  min clearance: "
              f"{result.min_clearance:.4f} m")
    return EXIT_CODES[result.outcome]


def _scene_bounds(scn: Scenario):
    if scn.wall is not None:
        return scn.wall[:4]
    pts = [scn.start[:2]]
    if scn.attractor is not None:
        pts.append(scn.attractor)
    for o in scn.obstacles:
        pts.append(o.center)
    pts = np.asarray(pts)
    lo = pts.min(axis=0) - 3.0
    hi = pts.max(axis=0) + 3.0
    return (lo[0], lo[1], hi[0], hi[1])


def cmd_field(args) -> int:
    try:
        scn = _load_scenario(args.scenario, args)
    except (ScenarioError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_USAGE
    bounds = args.bounds or _scene_bounds(scn)
    nx = ny = args.grid
    xs = np.linspace(bounds[0], bounds[2], nx)
    ys = np.linspace(bounds[1], bounds[3], ny)
    cfg = scn.agent
    world = scn.world_obstacles()
    modul = [GlideObstacle(inflate(o, cfg.radius)) for o in world]
    n_declared = len(scn.obstacles)
    tracked = [modul[i] for i in range(n_declared) if scn.tracked[i]]
    scan = None
    if scn.mode != "analytic":
        scan = synthesize_scan(world, (*scn.start[:2], scn.start[2]), scn.scan,
                               rng=np.random.default_rng(scn.seed))
        if scn.mode == "mixed" and tracked:
            scan = prune_points(scan, [m.inner for m in tracked])

    def nominal(pos):
        if scn.attractor is None:
            return np.array([1.0, 0.0])
        v = scn.attractor - pos
        n = float(np.hypot(*v))
        return v if n < 1e-12 else v * min(scn.v_max, n) / n

    nodes, vectors, blocked = [], [], []
    for y in ys:
        for x in xs:
            pos = np.array([x, y])
            nodes.append(pos)
            vn = nominal(pos)
            try:
                if scn.mode == "analytic":
                    vec = modulate_analytic(pos, vn, modul[:n_declared], cfg,
                                            tail=scn.tail)
                elif scn.mode == "sampled":
                    vec = modulate_sampled(pos, vn, scan, cfg)
                else:
                    vec = modulate_mixed(pos, vn, scan, tracked, cfg,
                                         prune=False)
                if any(o.gamma(pos) <= 1.0 for o in world):
                    raise InsideObstacleError()
                vectors.append(vec)
            except (ContactError, GammaSingularityError, InsideObstacleError):
                blocked.append(len(nodes) - 1)
                vectors.append(np.zeros(2))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "field.csv", "w") as fh:
        fh.write(_provenance(scn, scn.seed))
        fh.write("x,y,vx,vy,blocked\n")
        for i, (node, vec) in enumerate(zip(nodes, vectors)):
            fh.write(f"{node[0]:.9g},{node[1]:.9g},{vec[0]:.9g},{vec[1]:.9g},"
                     f"{int(i in set(blocked))}\n")
    svg = render_field(bounds, nodes, vectors, world,
                       scan.points if scan is not None else None, blocked)
    (out / "field.svg").write_text(svg)
    if args.json:
        print(json.dumps({"nodes": len(nodes), "blocked": len(blocked)}))
    else:
        print(f"field: {len(nodes)} nodes ({len(blocked)} inside obstacles) "
              f"-> {out}/field.svg")
    return 0


def cmd_replay(args) -> int:
    try:
        scan = load_scan(args.scan)
    except (OSError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_USAGE
    nominal_spec = json.loads(args.nominal)
    start = np.asarray(nominal_spec.get("start", [0.0, 0.0]), dtype=float)
    cfg_kw = nominal_spec.get("agent", {})
    from .obstacles import AgentConfig
    cfg = AgentConfig(**cfg_kw)
    dt = args.dt or 0.01
    seed = args.seed or 0
    if "attractor" in nominal_spec:
        attractor = np.asarray(nominal_spec["attractor"], dtype=float)

        def nominal(pos):
            v = attractor - pos
            n = float(np.hypot(*v))
            return v if n < 1e-12 else v * min(1.0, n) / n
    else:
        const = np.asarray(nominal_spec.get("constant", [1.0, 0.0]), dtype=float)

        def nominal(pos):
            return const.copy()
        attractor = None

    xi = start.astype(float).copy()
    t_max = nominal_spec.get("t_max", 40.0)
    rows = []
    outcome = "timeout"
    from .runtime import closest_distance, control_contribution
    for k in range(int(t_max / dt) + 1):
        t = k * dt
        vn = nominal(xi)
        try:
            v = modulate_sampled(xi, vn, scan, cfg)
        except ContactError:
            outcome = "collision"
            break
        d_min = closest_distance(xi, scan, cfg.radius)
        rows.append((t, xi[0], xi[1], math.atan2(v[1], v[0]),
                     float(np.hypot(*v)), 0.0,
                     control_contribution(v, vn), d_min))
        if attractor is not None and float(np.linalg.norm(xi - attractor)) < 0.01:
            outcome = "converged"
            break
        if float(np.hypot(*v)) < 1e-4 and t > 2.0:
            outcome = "local-minimum"
            break
        xi = xi + dt * v
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "replay.csv", "w") as fh:
        fh.write(_provenance(None, seed))
        fh.write(TRAJECTORY_HEADER + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")
    if args.json:
        print(json.dumps({"outcome": outcome, "ticks": len(rows)}))
    else:
        print(f"replay outcome: {outcome} ({len(rows)} ticks)")
    return EXIT_CODES[outcome]


def cmd_experiment(args) -> int:
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    report = convergence_experiment(args.runs, seed=args.seed or 0, jobs=jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "experiment.json").write_text(
        json.dumps(report.to_dict(), indent=1) + "\n")
    if args.json:
        print(json.dumps(report.to_dict()))
    else:
        print(report.format_table())
    return 0


def cmd_bench(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(",")) if args.sizes \
        else None
    report = run_benchmarks(sizes=sizes or (10, 100, 1000, 10000, 30000),
                            repetitions=args.repetitions, seed=args.seed or 0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.csv").write_text(report.to_csv())
    (out / "bench.json").write_text(report.to_json() + "\n")
    if args.json:
        print(report.to_json())
    else:
        print(report.format_table())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fastavoid",
                                description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True):
        if scenario:
            sp.add_argument("scenario", help="scenario JSON file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--dt", type=float, default=None)
        sp.add_argument("--mode", choices=("analytic", "sampled", "mixed"),
                        default=None)
        sp.add_argument("--tail", choices=("on", "off"), default=None)
        sp.add_argument("--out", default="out")
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("run", help="roll out a scenario")
    common(sp)
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("field", help="export the modulated vector field")
    common(sp)
    sp.add_argument("--grid", type=int, default=25)
    sp.add_argument("--bounds", type=float, nargs=4, default=None,
                    metavar=("XMIN", "YMIN", "XMAX", "YMAX"))
    sp.set_defaults(fn=cmd_field)

    sp = sub.add_parser("replay", help="roll out against a recorded scan")
    sp.add_argument("scan", help="scan CSV (with .json metadata sidecar)")
    sp.add_argument("--nominal", default='{"constant": [1.0, 0.0]}',
                    help="JSON: {attractor|constant, start, agent, t_max}")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--out", default="out")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_replay)

    sp = sub.add_parser("experiment", help="scan-only vs disparate comparison")
    sp.add_argument("--runs", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=None)
    sp.add_argument("--out", default="out")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_experiment)

    sp = sub.add_parser("bench", help="timing comparison of the three paths")
    sp.add_argument("--sizes", default=None,
                    help="comma-separated input sizes")
    sp.add_argument("--repetitions", type=int, default=25)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="out")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
