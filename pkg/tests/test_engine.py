import math

import numpy as np
import pytest

from kinseg import (
    ClusterInit,
    LineInit,
    PlacementError,
    Pose,
    SensorReading,
    TrialConfig,
    UniformRandomInit,
    WorldState,
    canonical_controller,
    control,
    init_world,
    run_trial,
    sense,
    step_pose,
    step_world,
    write_trajectory,
)
from kinseg.engine import _tick, init_kind_label


def test_init_uniform_confined_and_collision_free():
    cfg = TrialConfig(seed=3, classes=(20, 20), init=UniformRandomInit(5.0))
    world = init_world(cfg)
    assert world.n == 40
    assert (np.abs(world.poses[:, :2]) <= 2.5).all()
    dx = world.poses[:, 0][:, None] - world.poses[:, 0][None, :]
    dy = world.poses[:, 1][:, None] - world.poses[:, 1][None, :]
    dist = np.hypot(dx, dy)
    np.fill_diagonal(dist, np.inf)
    assert dist.min() >= 2 * cfg.robot.body_radius
    assert (world.poses[:, 2] > -math.pi).all() and (world.poses[:, 2] <= math.pi).all()


def test_init_same_seed_is_bit_identical():
    cfg = TrialConfig(seed=99, classes=(5, 5), init=ClusterInit(5.0))
    a, b = init_world(cfg), init_world(cfg)
    assert np.array_equal(a.poses, b.poses)
    assert np.array_equal(a.class_ids, b.class_ids)


def test_cluster_with_single_robot_sits_at_blob_center():
    cfg = TrialConfig(seed=7, classes=(1,), init=ClusterInit(5.0))
    world = init_world(cfg)
    # the blob center is the first draw of the seeded stream
    expected = np.random.default_rng(7).uniform(-2.5, 2.5, 2)
    assert np.array_equal(world.poses[0, :2], expected)


def test_line_init_rows_at_adjacency_pitch():
    cfg = TrialConfig(seed=5, classes=(4, 4), init=LineInit(5.0))
    world = init_world(cfg)
    pitch = 2 * cfg.robot.body_radius + cfg.metric_epsilon
    for cls in (0, 1):
        row = world.poses[world.class_ids == cls]
        assert np.allclose(np.diff(np.sort(row[:, 0])), pitch)
        assert np.ptp(row[:, 1]) == 0.0  # one horizontal row per class


def test_overcrowded_arena_raises():
    cfg = TrialConfig(seed=0, classes=(100, 100), init=UniformRandomInit(0.5), duration=1.0)
    with pytest.raises(PlacementError):
        init_world(cfg)


def test_single_robot_traces_clockwise_circle():
    cfg = TrialConfig(seed=1, classes=(1,), duration=5.0)
    world = WorldState(np.array([0]), np.array([[0.0, 0.0, 0.0]]), 0.0)
    radius = cfg.robot.interwheel / 10.0  # |R| of the scouting branch
    center = np.array([0.0, -radius])  # ICC sits to the robot's right
    world = step_world(world, cfg)
    assert world.poses[0, 2] < 0.0  # clockwise
    for _ in range(50):
        world = step_world(world, cfg)
        assert math.hypot(*(world.poses[0, :2] - center)) == pytest.approx(radius, rel=1e-9)


def test_head_on_collision_keeps_disks_separated():
    cfg = TrialConfig(seed=1, classes=(2,))
    r = cfg.robot.body_radius
    world = WorldState(
        np.array([0, 0]),
        np.array([[0.0, 0.0, 0.0], [2 * r, 0.0, math.pi]]),
        0.0,
    )
    stepped = step_world(world, cfg)
    d = math.hypot(*(stepped.poses[1, :2] - stepped.poses[0, :2]))
    assert d >= 2 * r - 1e-6


def test_no_tunneling_during_trial():
    cfg = TrialConfig(seed=4, classes=(6, 6), init=UniformRandomInit(1.5), duration=5.0)
    assert cfg.robot.v_max * cfg.robot.delta_t < cfg.robot.body_radius
    world = init_world(cfg)
    min_gap = 2 * cfg.robot.body_radius - 1e-6
    for _ in range(50):
        world = step_world(world, cfg)
        dx = world.poses[:, 0][:, None] - world.poses[:, 0][None, :]
        dy = world.poses[:, 1][:, None] - world.poses[:, 1][None, :]
        dist = np.hypot(dx, dy)
        np.fill_diagonal(dist, np.inf)
        assert dist.min() >= min_gap


def test_step_world_matches_scalar_pipeline_when_contact_free():
    cfg = TrialConfig(seed=0, classes=(3,))
    world = WorldState(
        np.array([0, 0, 0]),
        np.array([[0.0, 0.0, 0.3], [2.0, 0.5, -1.2], [-1.5, 1.0, 2.0]]),
        0.0,
    )
    stepped = step_world(world, cfg)
    for i, _, pose in world.robots():
        reading = sense(i, world, cfg.robot, cfg.sensor)
        expected = step_pose(pose, control(reading, cfg.params), cfg.robot)
        assert stepped.poses[i, 0] == expected.x
        assert stepped.poses[i, 1] == expected.y
        assert stepped.poses[i, 2] == expected.theta


def test_trajectory_permutes_with_robot_relabeling():
    cfg = TrialConfig(seed=12, classes=(6, 6), init=UniformRandomInit(2.0), duration=3.0)
    world = init_world(cfg)
    perm = np.random.default_rng(0).permutation(world.n)
    permuted = WorldState(world.class_ids[perm].copy(), world.poses[perm].copy(), world.time)
    a, b = world, permuted
    for _ in range(30):
        a = step_world(a, cfg)
        b = step_world(b, cfg)
    assert np.array_equal(a.poses[perm], b.poses)


def test_two_kin_robots_approach_over_sighting_cycles():
    # conditions S0-S2 hold at the defaults: v_max * delta_t is far below all bounds
    cfg = TrialConfig(seed=0, classes=(2,))
    world = WorldState(
        np.array([0, 0]),
        np.array([[0.0, 0.0, 0.0], [0.6, 0.0, math.pi / 2]]),
        0.0,
    )
    sighting_distances = []
    for _ in range(300):
        stepped, readings = _tick(world, cfg)
        if readings[0] == SensorReading.KIN:
            sighting_distances.append(math.hypot(*(world.poses[1, :2] - world.poses[0, :2])))
        world = stepped
    assert len(sighting_distances) > 10
    increases = np.diff(sighting_distances)
    assert increases.max() <= 1e-9


def test_run_trial_tick_and_sample_counts():
    cfg = TrialConfig(seed=2, classes=(3, 3), init=UniformRandomInit(2.0), duration=100.0)
    assert cfg.ticks == 1000
    assert cfg.gamma_samples == 100
    short = TrialConfig(seed=2, classes=(3, 3), init=UniformRandomInit(2.0), duration=0.1)
    assert short.ticks == 1
    result = run_trial(short)
    assert len(result.gamma) == 1


def test_run_trial_is_deterministic():
    cfg = TrialConfig(seed=17, classes=(4, 4), init=UniformRandomInit(2.0), duration=5.0)
    a = run_trial(cfg, record_trajectory=True)
    b = run_trial(cfg, record_trajectory=True)
    assert np.array_equal(a.gamma, b.gamma)
    assert a.c_total == b.c_total
    assert np.array_equal(a.final.poses, b.final.poses)
    assert np.array_equal(a.trajectory.poses, b.trajectory.poses)
    assert np.array_equal(a.trajectory.readings, b.trajectory.readings)


def test_trajectory_recording_shapes():
    cfg = TrialConfig(seed=8, classes=(2, 2), init=UniformRandomInit(2.0), duration=2.0)
    result = run_trial(cfg, record_trajectory=True)
    assert result.trajectory.poses.shape == (20, 4, 3)
    assert result.trajectory.readings.shape == (20, 4)
    assert result.trajectory.times[0] == 0.0
    assert result.trajectory.times[1] == pytest.approx(0.1)


def test_trajectory_export_format(tmp_path):
    cfg = TrialConfig(seed=8, classes=(2, 2), init=UniformRandomInit(2.0), duration=1.0)
    result = run_trial(cfg, record_trajectory=True)
    path = tmp_path / "trajectory.csv"
    write_trajectory(result, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,robot_id,class_id,x,y,theta,S"
    assert len(lines) == 1 + cfg.ticks * 4
    fields = lines[1].split(",")
    assert len(fields) == 7
    assert fields[1] == "0"
    assert int(fields[6]) in (0, 1, 2)
    # floats carry at most 9 significant digits
    for value in (fields[0], fields[3], fields[4], fields[5]):
        digits = value.replace("-", "").replace(".", "").replace("e", "").lstrip("0")
        assert len(digits) <= 10


def test_run_trial_without_recording_has_no_trajectory():
    cfg = TrialConfig(seed=8, classes=(2,), duration=0.5)
    assert run_trial(cfg).trajectory is None


def test_invalid_configs_rejected():
    with pytest.raises(ValueError):
        TrialConfig(seed=-1)
    with pytest.raises(ValueError):
        TrialConfig(classes=())
    with pytest.raises(ValueError):
        TrialConfig(classes=(0, 3))
    with pytest.raises(ValueError):
        TrialConfig(duration=0.0)
    with pytest.raises(ValueError):
        TrialConfig(metric_epsilon=0.0)


def test_init_kind_labels():
    assert init_kind_label(UniformRandomInit()) == "uniform_random"
    assert init_kind_label(ClusterInit()) == "clusters"
    assert init_kind_label(LineInit()) == "lines"
