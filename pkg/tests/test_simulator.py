import json
import math

import numpy as np
import pytest

from fastavoid.errors import ScenarioError
from fastavoid.obstacles import AgentConfig, Circle, Ellipse, rectangle
from fastavoid.scenario import (IntegratorSpec, ScanSpec, Scenario,
                                wall_slabs)
from fastavoid.simulator import (comparison_scene, convergence_experiment,
                                 rollout, synthesize_scan)

AGENT = AgentConfig(radius=0.45, gap_distance=0.5)


# --- scan synthesis -----------------------------------------------------------

def test_empty_world_empty_scan():
    scan = synthesize_scan([], (0, 0, 0), ScanSpec(max_range=10))
    assert len(scan) == 0


def test_circle_dead_ahead_range():
    c = Circle(1.0, center=(5.0, 0.0))
    spec = ScanSpec(delta=7e-3, fov=(-0.1, 0.1), max_range=20)
    scan = synthesize_scan([c], (0, 0, 0), spec)
    d = np.linalg.norm(scan.points, axis=1)
    assert d.min() == pytest.approx(4.0, abs=1e-3)


def test_beam_count_matches_fov():
    # +-0.75 pi at 7e-3 rad increment: about 673 beams
    spec = ScanSpec(delta=7e-3, fov=(-0.75 * math.pi, 0.75 * math.pi),
                    max_range=100)
    wall = rectangle(40, 1, center=(0, 15))
    scan = synthesize_scan([wall], (0, 0, math.pi / 2), spec)
    n_expected = int(round(1.5 * math.pi / 7e-3))
    assert abs(n_expected - 673) <= 1
    assert len(scan) > 250       # the wall subtends a wide arc


def test_ranges_match_marching_oracle(rng):
    # fine-grained ray marching against contains()
    for _ in range(6):
        obstacles = [Circle(rng.uniform(0.4, 1.0), center=rng.uniform(-3, 3, 2)),
                     Ellipse((rng.uniform(0.4, 1.2), rng.uniform(0.3, 0.8)),
                             center=rng.uniform(-3, 3, 2),
                             orientation=rng.uniform(0, 3)),
                     rectangle(rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5),
                               center=rng.uniform(-3, 3, 2),
                               orientation=rng.uniform(0, 3))]
        pose = (4.5, 4.5, rng.uniform(0, 2 * math.pi))
        if any(o.contains(pose[:2]) for o in obstacles):
            continue
        spec = ScanSpec(delta=0.2, fov=(-math.pi, math.pi), max_range=14)
        scan = synthesize_scan(obstacles, pose, spec)
        origin = np.array(pose[:2])
        for p in scan.points:
            r = np.linalg.norm(p - origin)
            d = (p - origin) / r
            # march at 1e-3 up to just before the reported range: free space
            ts = np.arange(1e-3, r - 1e-5, 1e-3)
            probes = origin[None, :] + ts[:, None] * d[None, :]
            for obs in obstacles:
                assert not np.any(obs.gamma_batch(probes) < 1.0 - 1e-4)
            # just past the range: inside some obstacle
            probe = origin + (r + 1e-5) * d
            assert any(o.gamma(probe) <= 1.0 + 1e-3 for o in obstacles)


def test_scan_noise_seeded_deterministic():
    c = Circle(1.0, center=(5, 0))
    spec = ScanSpec(delta=0.05, fov=(-0.3, 0.3), max_range=20, noise_sigma=0.01)
    a = synthesize_scan([c], (0, 0, 0), spec, rng=np.random.default_rng(7))
    b = synthesize_scan([c], (0, 0, 0), spec, rng=np.random.default_rng(7))
    assert np.array_equal(a.points, b.points)


# --- scenario files -------------------------------------------------------------

SCENARIO_DICT = {
    "obstacles": [
        {"type": "circle", "center": [2.0, 0.0], "radius": 0.6},
        {"type": "ellipse", "center": [-1.0, 1.0], "axes": [1.2, 0.5],
         "orientation": 0.4, "tracked": False},
        {"type": "polygon", "center": [0.0, -2.0],
         "vertices": [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]},
    ],
    "wall": [-5.0, -5.0, 5.0, 5.0],
    "agent": {"radius": 0.35, "gap_distance": 0.5},
    "start": [-4.0, 0.0, 0.0],
    "attractor": [4.0, 0.0],
    "scan": {"delta": 0.02, "max_range": 20.0},
    "integrator": {"dt": 0.01, "scheme": "rk4"},
    "seed": 3,
    "mode": "mixed",
}


def test_scenario_round_trip_exact():
    scn = Scenario.from_dict(SCENARIO_DICT)
    again = Scenario.from_json(scn.to_json())
    assert scn.to_json() == again.to_json()
    assert scn.sha256() == again.sha256()


def test_scenario_wall_expands_to_four_slabs():
    scn = Scenario.from_dict(SCENARIO_DICT)
    assert len(scn.world_obstacles()) == len(scn.obstacles) + 4
    slabs = wall_slabs(scn.wall)
    # interior faces sit exactly on the bounds
    assert slabs[0].surface_distance((0.0, 5.0)) == pytest.approx(0.0, abs=1e-12)
    assert slabs[2].surface_distance((-5.0, 0.0)) == pytest.approx(0.0, abs=1e-12)


def test_scenario_tracked_flags():
    scn = Scenario.from_dict(SCENARIO_DICT)
    assert scn.tracked == [True, False, True]
    assert len(scn.tracked_obstacles()) == 2


@pytest.mark.parametrize("mutate,pointer", [
    (lambda d: d["obstacles"][0].pop("radius"), "/obstacles/0/radius"),
    (lambda d: d["obstacles"][1].update(axes=[1.0]), "/obstacles/1/axes"),
    (lambda d: d.update(start="nope"), "/start"),
    (lambda d: d.update(mode="psychic"), "/mode"),
    (lambda d: d["scan"].update(delta=-1), "/scan/delta"),
    (lambda d: d.update(wall=[1, 2]), "/wall"),
    (lambda d: d["agent"].update(radius=-2), "/agent"),
    (lambda d: d["obstacles"][2].update(type="blob"), "/obstacles/2/type"),
])
def test_schema_errors_carry_json_pointers(mutate, pointer):
    data = json.loads(json.dumps(SCENARIO_DICT))
    mutate(data)
    with pytest.raises(ScenarioError) as err:
        Scenario.from_dict(data)
    assert err.value.pointer.startswith(pointer)


# --- rollouts ----------------------------------------------------------------------

def doorway_scenario(gap, mode="sampled"):
    # a doorway mouth has wall points inside the gap distance on both sides,
    # where stopping is allowed; threading needs the saturation band to start
    # later than the slot half-width, hence the small gap_distance here
    half = gap / 2
    wall_len = 4.0
    return Scenario(
        obstacles=[
            rectangle(0.4, wall_len, center=(0.0, half + wall_len / 2)),
            rectangle(0.4, wall_len, center=(0.0, -half - wall_len / 2)),
        ],
        tracked=[False, False],
        agent=AgentConfig(radius=0.45, gap_distance=0.2),
        start=np.array([-3.0, 0.0, 0.0]),
        attractor=np.array([3.0, 0.0]),
        scan=ScanSpec(delta=7e-3, fov=(-math.pi, math.pi), max_range=20),
        integrator=IntegratorSpec(dt=0.01, scheme="rk4"),
        seed=0, mode=mode, t_max=40.0, v_max=1.0,
    )


def test_doorway_pass_gap_wider_than_diameter():
    gap = 2 * AGENT.radius + 0.1
    result = rollout(doorway_scenario(gap))
    assert result.outcome == "converged"
    assert result.min_clearance >= -1e-4


def test_doorway_too_narrow_no_collision():
    gap = 2 * AGENT.radius - 0.05
    result = rollout(doorway_scenario(gap))
    assert result.outcome in ("local-minimum", "timeout")
    assert result.min_clearance >= -1e-4


def test_attractor_inside_obstacle_never_collides():
    scn = Scenario(
        obstacles=[Circle(1.0, center=(2.0, 0.0))], tracked=[True],
        agent=AGENT, start=np.array([-2.0, 0.05, 0.0]),
        attractor=np.array([2.0, 0.0]),
        scan=ScanSpec(delta=0.02), integrator=IntegratorSpec(),
        seed=0, mode="analytic", t_max=20.0)
    result = rollout(scn)
    assert result.outcome in ("local-minimum", "timeout")
    assert result.min_clearance >= -1e-4


def test_head_on_saddle_start_stalls():
    scn = Scenario(
        obstacles=[Circle(1.0, center=(0.0, 0.0))], tracked=[True],
        agent=AGENT, start=np.array([-4.0, 0.0, 0.0]),
        attractor=np.array([4.0, 0.0]),
        scan=ScanSpec(delta=0.02), integrator=IntegratorSpec(),
        seed=0, mode="analytic", t_max=25.0)
    result = rollout(scn)
    assert result.outcome == "local-minimum"
    assert result.min_clearance >= -1e-4


def test_rollout_bitwise_deterministic():
    scn1 = comparison_scene(5)
    scn2 = comparison_scene(5)
    a, b = rollout(scn1), rollout(scn2)
    assert a.outcome == b.outcome
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.velocities, b.velocities)
    assert a.min_clearance == b.min_clearance


def test_empty_experiment():
    report = convergence_experiment(0)
    assert report.n_runs == 0
    assert math.isnan(report.ratio_sampled)


def test_small_experiment_runs():
    report = convergence_experiment(2, seed=11)
    assert report.n_runs == 2
    assert 0 <= report.converged_sampled <= 2
    assert 0 <= report.converged_disparate <= 2
    assert len(report.outcomes) == 2
