import numpy as np
import pytest

from fastavoid.analytic import modulate_analytic
from fastavoid.bench import (BenchReport, _linear_fit, baseline_modulate,
                             run_benchmarks)
from fastavoid.obstacles import AgentConfig, Circle

CFG = AgentConfig()


def test_baseline_empty_world():
    v = np.array([1.0, -0.5])
    out = baseline_modulate((0, 0), v, [], CFG)
    assert np.array_equal(out, v)


def test_baseline_matches_fast_for_single_obstacle(rng):
    for _ in range(30):
        c = Circle(rng.uniform(0.3, 1.2), center=rng.uniform(-4, 4, 2))
        xi = rng.uniform(-6, 6, 2)
        try:
            if c.gamma(xi) < 1.2:
                continue
        except Exception:
            continue
        v = rng.normal(size=2)
        fast = modulate_analytic(xi, v, [c], CFG, tail=False)
        base = baseline_modulate(xi, v, [c], CFG)
        np.testing.assert_allclose(base, fast, atol=1e-9)


def test_baseline_averaging_avoids_cancellation():
    # two symmetric obstacles deflect in opposite directions; averaging
    # magnitude and direction separately keeps the speed alive
    obs = [Circle(0.5, center=(2.0, 1.2)), Circle(0.5, center=(2.0, -1.2))]
    v = np.array([1.0, 0.0])
    out = baseline_modulate((0, 0), v, obs, CFG)
    assert np.linalg.norm(out) > 0.3


def test_linear_fit_recovers_slope():
    ns = [10, 100, 1000, 10000]
    ts = [1e-6 + 2e-8 * n for n in ns]
    slope, r2 = _linear_fit(ns, ts)
    assert slope == pytest.approx(2e-8, rel=1e-6)
    assert r2 == pytest.approx(1.0)


def test_benchmark_report_shape():
    report = run_benchmarks(sizes=(10, 50), repetitions=3, seed=1)
    paths = {r.path for r in report.rows}
    assert paths == {"fast-analytic", "baseline-analytic", "sampled"}
    assert len(report.rows) == 6
    assert set(report.fits) == paths
    csv_text = report.to_csv()
    assert csv_text.splitlines()[0] == "path,n,median_s,p95_s,repetitions"
    assert "fast-analytic" in report.format_table()
    assert "rows" in report.to_dict()
