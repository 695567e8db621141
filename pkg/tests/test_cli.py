import json
import math

import numpy as np
import pytest

from fastavoid.cli import main
from fastavoid.sampled import save_scan

DOORWAY = {
    "obstacles": [
        {"type": "polygon", "center": [0.0, 2.5],
         "vertices": [[-0.2, -2.0], [0.2, -2.0], [0.2, 2.0], [-0.2, 2.0]]},
        {"type": "polygon", "center": [0.0, -2.5],
         "vertices": [[-0.2, -2.0], [0.2, -2.0], [0.2, 2.0], [-0.2, 2.0]]},
    ],
    "agent": {"radius": 0.45, "gap_distance": 0.2},
    "start": [-3.0, 0.0, 0.0],
    "attractor": [3.0, 0.0],
    "scan": {"delta": 7e-3, "max_range": 20.0},
    "integrator": {"dt": 0.01, "scheme": "rk4"},
    "seed": 0,
    "mode": "sampled",
    "t_max": 40.0,
}


@pytest.fixture
def doorway_file(tmp_path):
    path = tmp_path / "doorway.json"
    path.write_text(json.dumps(DOORWAY))
    return path


def test_run_doorway_converges(doorway_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", str(doorway_file), "--out", str(out), "--json"])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["outcome"] == "converged"
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0].startswith("# fastavoid")    # provenance header
    assert "seed=0" in lines[0] and "scenario_sha256=" in lines[0]
    assert lines[1] == "t,x,y,theta,v_cmd_lin,v_cmd_ang,delta_c,d_min"
    assert (out / "trajectory.svg").exists()
    assert (out / "summary.json").exists()


def test_run_empty_world_straight_line(tmp_path, capsys):
    scn = {"obstacles": [], "start": [0.0, 0.0], "attractor": [2.0, 0.0],
           "mode": "analytic", "t_max": 20.0}
    f = tmp_path / "empty.json"
    f.write_text(json.dumps(scn))
    out = tmp_path / "out"
    code = main(["run", str(f), "--out", str(out)])
    assert code == 0
    rows = [l for l in (out / "trajectory.csv").read_text().splitlines()
            if l and not l.startswith(("#", "t,"))]
    ys = [abs(float(r.split(",")[2])) for r in rows]
    assert max(ys) < 1e-9        # never leaves the axis


def test_run_malformed_file_exits_64(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"obstacles": [{"type": "circle", "center": [0,0]}]}')
    code = main(["run", str(bad), "--out", str(tmp_path / "o")])
    assert code == 64
    err = capsys.readouterr().err
    assert "/obstacles/0/radius" in err


def test_run_not_json_exits_64(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("not json at all")
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 64


def test_run_seed_override_changes_hash(doorway_file, tmp_path, capsys):
    out = tmp_path / "out"
    main(["run", str(doorway_file), "--seed", "7", "--out", str(out), "--json"])
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert "seed=7" in header


def test_field_far_nodes_equal_nominal(tmp_path, capsys):
    scn = {"obstacles": [{"type": "circle", "center": [0, 0], "radius": 0.5}],
           "start": [-300.0, -300.0], "attractor": [-290.0, -300.0],
           "mode": "analytic"}
    f = tmp_path / "scene.json"
    f.write_text(json.dumps(scn))
    out = tmp_path / "field"
    code = main(["field", str(f), "--grid", "5",
                 "--bounds", "-302", "-302", "-298", "-298",
                 "--out", str(out), "--json"])
    assert code == 0
    rows = [l.split(",") for l in (out / "field.csv").read_text().splitlines()
            if l and not l.startswith(("#", "x,"))]
    # far from the obstacle every arrow equals the clipped pull
    for x, y, vx, vy, blocked in rows:
        pos = np.array([float(x), float(y)])
        vn = np.array([-290.0, -300.0]) - pos
        vn = vn / np.linalg.norm(vn) * min(1.0, np.linalg.norm(vn))
        if np.linalg.norm(vn) < 1e-9:
            continue
        got = np.array([float(vx), float(vy)])
        assert np.linalg.norm(got - vn) < 1e-5
    assert (out / "field.svg").read_text().startswith("<svg")


def test_field_marks_blocked_nodes(tmp_path, capsys):
    scn = {"obstacles": [{"type": "circle", "center": [0, 0], "radius": 1.0}],
           "start": [-3.0, 0.0], "attractor": [3.0, 0.0], "mode": "analytic"}
    f = tmp_path / "scene.json"
    f.write_text(json.dumps(scn))
    out = tmp_path / "field"
    code = main(["field", str(f), "--grid", "9",
                 "--bounds", "-2", "-2", "2", "2", "--out", str(out), "--json"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["blocked"] > 0


def test_field_tail_suppresses_wake(tmp_path):
    scn = {"obstacles": [{"type": "circle", "center": [0, 0], "radius": 1.0}],
           "start": [-5.0, 0.0], "attractor": [100.0, 0.0], "mode": "analytic",
           "v_max": 1.0}
    f = tmp_path / "scene.json"
    f.write_text(json.dumps(scn))
    for tail, name in (("on", "wake_on"), ("off", "wake_off")):
        main(["field", str(f), "--grid", "3", "--tail", tail,
              "--bounds", "2.0", "-0.2", "4.0", "0.2",
              "--out", str(tmp_path / name)])

    def wake_deflection(name):
        rows = [l.split(",") for l in
                (tmp_path / name / "field.csv").read_text().splitlines()
                if l and not l.startswith(("#", "x,"))]
        worst = 0.0
        for x, y, vx, vy, blocked in rows:
            if blocked == "1":
                continue
            vn = np.array([100.0, 0.0]) - np.array([float(x), float(y)])
            vn = vn / np.linalg.norm(vn) * 1.0
            worst = max(worst, float(np.linalg.norm(
                np.array([float(vx), float(vy)]) - vn)))
        return worst

    # tail negligence nearly restores the nominal in the wake; without it
    # the wake deflection stays an order of magnitude larger
    assert wake_deflection("wake_on") < 5e-3
    assert wake_deflection("wake_off") > 10 * wake_deflection("wake_on")


def test_replay_frozen_scan(tmp_path, capsys):
    # synthesize a frozen doorway scan from the scenario geometry
    from fastavoid.scenario import Scenario
    from fastavoid.simulator import synthesize_scan
    scn = Scenario.from_dict(DOORWAY)
    scan = synthesize_scan(scn.world_obstacles(), (-3.0, 0.0, 0.0),
                           scn.scan)
    # store as polar beams around the recording pose
    rel = scan.points - np.array([-3.0, 0.0])
    angles = np.arctan2(rel[:, 1], rel[:, 0])
    ranges = np.linalg.norm(rel, axis=1)
    save_scan(tmp_path / "frozen.csv", angles, ranges,
              {"delta": 7e-3, "fov": [-math.pi, math.pi], "max_range": 20.0,
               "pose": [-3.0, 0.0, 0.0]})
    out = tmp_path / "replay"
    code = main([
        "replay", str(tmp_path / "frozen.csv"),
        "--nominal", json.dumps({"attractor": [3.0, 0.0],
                                 "start": [-3.0, 0.0],
                                 "agent": {"radius": 0.45,
                                           "gap_distance": 0.2},
                                 "t_max": 40.0}),
        "--out", str(out), "--json"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["outcome"] == "converged"
    text = (out / "replay.csv").read_text()
    assert text.splitlines()[1] == "t,x,y,theta,v_cmd_lin,v_cmd_ang,delta_c,d_min"


def test_replay_missing_sidecar_is_usage_error(tmp_path, capsys):
    (tmp_path / "scan.csv").write_text("angle_rad,range_m\n0,1\n")
    assert main(["replay", str(tmp_path / "scan.csv"),
                 "--out", str(tmp_path / "o")]) == 64


def test_experiment_tiny(tmp_path, capsys):
    out = tmp_path / "exp"
    code = main(["experiment", "--runs", "1", "--seed", "3",
                 "--out", str(out), "--json"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["n_runs"] == 1
    assert (out / "experiment.json").exists()


def test_bench_tiny(tmp_path, capsys):
    out = tmp_path / "bench"
    code = main(["bench", "--sizes", "10,50", "--repetitions", "3",
                 "--out", str(out), "--json"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert "rows" in data
    assert (out / "bench.csv").exists()
    assert (out / "bench.json").exists()
