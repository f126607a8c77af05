import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import scenario_path
from skylink.config import load_config
from skylink.filters import NoiseConfig
from skylink.geoloc import CameraFov, UavPose
from skylink.sensing import SensorNoise, point_gimbal_at
from skylink.simworld import (
    STRATEGIES,
    Disturbance,
    ScenarioConfig,
    SearchPattern,
    TraceRecord,
    UsvPlan,
    UsvState,
    VelocityCommand,
    compute_metrics,
    run_scenario,
    usv_step,
)
from skylink.frames import EulerAngles

CALM = Disturbance()


def stationary_cfg(**overrides):
    target = np.array([150.0, 40.0, 0.0])
    uav = UavPose([0, 0, 7.5])
    base = dict(
        duration=10.0,
        dt=0.1,
        uav=uav.with_gimbal(point_gimbal_at(target, uav)),
        fov=CameraFov.from_degrees(30, 20),
        usv_start=UsvState(target),
    )
    base.update(overrides)
    return ScenarioConfig(**base)


def test_zero_velocity_no_disturbance_stays_put():
    s = UsvState([5.0, 6.0, 0.0])
    out = usv_step(s, VelocityCommand(0.0), 1.0, CALM, np.random.default_rng(0))
    np.testing.assert_array_equal(out.position, s.position)


def test_surge_east_integration():
    out = usv_step(UsvState([0, 0, 0], yaw=0.0), VelocityCommand(1.0), 1.0, CALM, np.random.default_rng(0))
    np.testing.assert_allclose(out.position, [1.0, 0, 0], atol=1e-15)


def test_wave_drift_integrates_sinusoid():
    d = Disturbance(amplitude=0.3, period=8.0, heading=math.pi / 2)
    out = usv_step(UsvState([0, 0, 0]), VelocityCommand(0.0), 0.5, d, np.random.default_rng(0), t=2.0)
    # sin(2*pi*2/8) = 1: full amplitude northward for half a second
    np.testing.assert_allclose(out.position, [0, 0.15, 0], atol=1e-15)


def test_waypoint_north_heading_converges_then_closes():
    rng = np.random.default_rng(0)
    s = UsvState([0, 0, 0], yaw=0.0)
    wp = (0.0, 100.0, 2.0)
    turn_rate = math.radians(15)
    dists, yaws = [], []
    while not dists or dists[-1] > 3.0:
        s = usv_step(s, wp, 1.0, CALM, rng, turn_rate=turn_rate)
        dists.append(math.hypot(s.position[0], s.position[1] - 100))
        yaws.append(s.yaw)
    aligned = next(i for i, y in enumerate(yaws) if abs(y - math.pi / 2) < 1e-9)
    assert aligned <= math.ceil((math.pi / 2) / turn_rate)
    assert np.all(np.diff(dists[aligned:]) < 0)


def test_zero_noise_stationary_ekf_matches_truth():
    trace = run_scenario(stationary_cfg())
    assert len(trace) == 101
    for rec in trace:
        np.testing.assert_allclose(rec.ekf_estimate, rec.usv_true, atol=1e-6)


def test_same_seed_identical_traces():
    cfg = stationary_cfg(noise=SensorNoise(pixel_sigma=0.01, range_sigma=1.0, miss_probability=0.2), seed=9)
    a, b = run_scenario(cfg), run_scenario(cfg)
    for ra, rb in zip(a, b):
        np.testing.assert_array_equal(np.nan_to_num(ra.ekf_estimate), np.nan_to_num(rb.ekf_estimate))
        np.testing.assert_array_equal(ra.usv_true, rb.usv_true)
        assert ra.measurement == rb.measurement


def test_different_seed_differs():
    noise = SensorNoise(pixel_sigma=0.01, range_sigma=1.0)
    a = run_scenario(stationary_cfg(noise=noise, seed=1))
    b = run_scenario(stationary_cfg(noise=noise, seed=2))
    assert not np.array_equal(a[-1].ekf_estimate, b[-1].ekf_estimate)


def test_water_plane_pinning_and_error_consistency():
    cfg = load_config(scenario_path("canonical"))
    cfg = replace(cfg, water_height=-1.25, duration=30.0)
    for rec in run_scenario(cfg):
        assert rec.usv_true[2] == -1.25
        for strategy, attr in zip(STRATEGIES, ("error_2d_ekf", "error_2d_mean", "error_2d_raw")):
            d = rec.estimate(strategy) - rec.usv_true
            assert getattr(rec, attr) == pytest.approx(math.sqrt(d[0] ** 2 + d[1] ** 2), abs=1e-12)


def test_coasting_between_measurements():
    cfg = stationary_cfg(noise=SensorNoise(pixel_sigma=0.01, range_sigma=1.0, miss_probability=0.5), seed=4)
    trace = run_scenario(cfg)
    for prev, cur in zip(trace, trace[1:]):
        if cur.measurement is None and not np.isnan(prev.ekf_estimate).any():
            np.testing.assert_array_equal(cur.ekf_estimate, prev.ekf_estimate)
            assert np.trace(cur.ekf_covariance) >= np.trace(prev.ekf_covariance) - 1e-12


def test_measurements_at_period():
    trace = run_scenario(stationary_cfg(measurement_period=0.5))
    times = [r.time for r in trace if r.measurement is not None]
    np.testing.assert_allclose(times, np.arange(0, 10.0001, 0.5))


@pytest.mark.parametrize(
    "overrides",
    [dict(dt=0.0), dict(duration=0.01), dict(measurement_period=0.05), dict(measurement_period=0.25), dict(seed=-1)],
)
def test_config_validation(overrides):
    with pytest.raises(ValueError):
        stationary_cfg(**overrides)


def test_search_pattern_acquires_target():
    target = np.array([0.0, -120.0, 0.0])
    cfg = stationary_cfg(
        duration=60.0,
        dt=1.0,
        uav=UavPose([0, 0, 7.5], gimbal=EulerAngles(0, math.radians(-5), 0)),
        usv_start=UsvState(target),
        search=SearchPattern(yaw_step=math.radians(10), pitches=(math.radians(-5),)),
    )
    trace = run_scenario(cfg)
    assert trace[0].measurement is None
    first = next(i for i, r in enumerate(trace) if r.measurement is not None)
    assert first < 36
    assert trace[-1].error_2d_ekf < 1e-6


def _rec(t, truth, est):
    truth, est = np.asarray(truth, float), np.asarray(est, float)
    return TraceRecord(t, truth, 0.0, est, est, est, None, EulerAngles(), np.eye(3))


def test_metrics_zero_error():
    trace = [_rec(t, [t, 0, 0], [t, 0, 0]) for t in range(0, 101)]
    m = compute_metrics(trace, [10, 50, 100])
    assert all(r.err_2d == 0 for r in m.rows)
    assert m.mean_2d["ekf"] == 0 and m.max_2d["no_filter"] == 0


def test_metrics_constant_offset():
    trace = [_rec(t, [t, 1, 0], [t + 3, 5, 0]) for t in range(0, 101)]
    m = compute_metrics(trace, [10, 50, 100])
    assert len(m.rows) == 9
    for r in m.rows:
        assert (r.err_x, r.err_y, r.err_2d) == (3.0, 4.0, 5.0)
    for s in STRATEGIES:
        assert m.mean_2d[s] == 5.0 and m.max_2d[s] == 5.0


def test_metrics_checkpoint_uses_record_at_or_before():
    trace = [_rec(t, [0, 0, 0], [t, 0, 0]) for t in (0.0, 4.0, 8.0)]
    m = compute_metrics(trace, [7.9, 8.0])
    assert m.row("ekf", 7.9).err_x == 4.0
    assert m.row("ekf", 8.0).err_x == 8.0


def test_metrics_rejects_bad_input():
    with pytest.raises(ValueError):
        compute_metrics([], [1.0])
    with pytest.raises(ValueError):
        compute_metrics([_rec(0.0, [0, 0, 0], [0, 0, 0])], [5.0])


def test_ekf_beats_no_filter_on_most_seeds():
    base = load_config(scenario_path("canonical"))
    wins = 0
    for seed in range(20):
        m = compute_metrics(run_scenario(replace(base, seed=seed)), [100.0])
        wins += m.row("ekf", 100.0).err_2d < m.row("no_filter", 100.0).err_2d
    assert wins >= 15
