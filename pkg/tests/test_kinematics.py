import math

import numpy as np
import pytest

from kinseg import (
    Pose,
    RobotCharacteristics,
    WheelSpeeds,
    arc_geometry,
    step_pose,
    to_physical,
    wrap_angle,
)
from kinseg.kinematics import wrap_angles

from oracles import euler_pose, integrated_pose

RC = RobotCharacteristics()


def test_wrap_angle_range():
    for theta in (-100.0, -math.pi, -1.0, 0.0, 1.0, math.pi, 4.0, 100.0, 1e6):
        wrapped = wrap_angle(theta)
        assert -math.pi < wrapped <= math.pi
        assert math.sin(wrapped) == pytest.approx(math.sin(theta), abs=1e-9)
        assert math.cos(wrapped) == pytest.approx(math.cos(theta), abs=1e-9)


def test_wrap_angle_scalar_matches_vector():
    values = np.array([-7.0, -math.pi, -1e-9, 0.0, 2.5, math.pi, 9.42, 2 * math.pi])
    vec = wrap_angles(values)
    for v, w in zip(values, vec):
        assert wrap_angle(float(v)) == w


def test_pose_normalizes_heading():
    assert Pose(0.0, 0.0, math.pi).theta == math.pi
    assert Pose(0.0, 0.0, -math.pi).theta == math.pi
    assert Pose(0.0, 0.0, 3 * math.pi).theta == pytest.approx(math.pi)
    assert Pose(1.0, 2.0, 0.25).theta == 0.25


def test_pose_rejects_nonfinite():
    with pytest.raises(ValueError):
        Pose(math.nan, 0.0, 0.0)
    with pytest.raises(ValueError):
        Pose(0.0, 0.0, math.inf)


def test_characteristics_validation():
    with pytest.raises(ValueError):
        RobotCharacteristics(v_max=0.0)
    with pytest.raises(ValueError):
        RobotCharacteristics(delta_t=-0.1)
    # wheels must fit inside the body disk
    with pytest.raises(ValueError):
        RobotCharacteristics(body_radius=0.05, interwheel=0.14)


def test_to_physical_scaling():
    assert to_physical(WheelSpeeds(1.0, 1.0), RobotCharacteristics(v_max=0.3)) == (0.3, 0.3)
    assert to_physical(WheelSpeeds(0.0, 0.0), RobotCharacteristics(v_max=0.42)) == (0.0, 0.0)
    left, right = to_physical(WheelSpeeds(1.0, -2.0 / 3.0), RobotCharacteristics(v_max=0.15))
    assert left == pytest.approx(0.15, rel=1e-12)
    assert right == pytest.approx(-0.1, rel=1e-12)


def test_arc_geometry_known_branches():
    geometry = arc_geometry(WheelSpeeds(1.0 / 3.0, 1.0), RC)
    assert geometry.radius == pytest.approx(RC.interwheel, rel=1e-12)
    assert geometry.omega == pytest.approx((2.0 / 3.0) * RC.v_max / RC.interwheel, rel=1e-12)

    geometry = arc_geometry(WheelSpeeds(1.0, -2.0 / 3.0), RC)
    assert geometry.radius == pytest.approx(-RC.interwheel / 10.0, rel=1e-12)
    assert geometry.omega == pytest.approx(-(5.0 / 3.0) * RC.v_max / RC.interwheel, rel=1e-12)

    geometry = arc_geometry(WheelSpeeds(1.0, 0.0), RC)
    assert geometry.radius == pytest.approx(-RC.interwheel / 2.0, rel=1e-12)
    assert geometry.omega == pytest.approx(-RC.v_max / RC.interwheel, rel=1e-12)


def test_arc_geometry_straight_is_represented_not_thrown():
    geometry = arc_geometry(WheelSpeeds(0.5, 0.5), RC)
    assert geometry.straight
    assert math.isinf(geometry.radius)
    assert geometry.omega == 0.0


def test_arc_geometry_scaling_with_vmax():
    reference = arc_geometry(WheelSpeeds(0.25, 0.75), RobotCharacteristics(v_max=1.0))
    for v_max in (0.05, 0.3, 0.9):
        geometry = arc_geometry(WheelSpeeds(0.25, 0.75), RobotCharacteristics(v_max=v_max))
        assert geometry.radius == reference.radius  # independent of v_max
        assert geometry.omega == pytest.approx(v_max * reference.omega, rel=1e-12)


def test_step_straight_line():
    rc = RobotCharacteristics(v_max=1.0, delta_t=1.0)
    pose = step_pose(Pose(0.0, 0.0, 0.0), WheelSpeeds(1.0, 1.0), rc)
    assert (pose.x, pose.y, pose.theta) == (1.0, 0.0, 0.0)


def test_step_pure_rotation_in_place():
    pose = step_pose(Pose(0.0, 0.0, 0.0), WheelSpeeds(-1.0, 1.0), RC)
    assert pose.x == 0.0
    assert pose.y == 0.0
    assert pose.theta == pytest.approx(2.0 * RC.v_max * RC.delta_t / RC.interwheel, rel=1e-12)


def test_step_matches_integration_oracle():
    rc = RobotCharacteristics(v_max=0.15)
    speeds = WheelSpeeds(1.0 / 3.0, 1.0)
    expected = integrated_pose(Pose(0.0, 0.0, 0.0), speeds, rc, 10**6)
    pose = step_pose(Pose(0.0, 0.0, 0.0), speeds, rc)
    assert math.hypot(pose.x - expected[0], pose.y - expected[1]) < 1e-9
    assert pose.theta == pytest.approx(expected[2], abs=1e-12)


def test_euler_integration_converges_to_arc_step():
    speeds = WheelSpeeds(0.0, 1.0)
    pose = step_pose(Pose(0.0, 0.0, 0.3), speeds, RC)
    errors = []
    for substeps in (10**2, 10**4, 10**6):
        x, y, _ = euler_pose(Pose(0.0, 0.0, 0.3), speeds, RC, substeps)
        errors.append(math.hypot(pose.x - x, pose.y - y))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-7


def test_mirrored_wheel_speeds_mirror_trajectory():
    rng = np.random.default_rng(5)
    for _ in range(50):
        a, b = rng.uniform(-1.0, 1.0, 2)
        pose = step_pose(Pose(0.0, 0.0, 0.0), WheelSpeeds(a, b), RC)
        mirror = step_pose(Pose(0.0, 0.0, 0.0), WheelSpeeds(b, a), RC)
        assert mirror.x == pytest.approx(pose.x, abs=1e-12)
        assert mirror.y == pytest.approx(-pose.y, abs=1e-12)
        assert mirror.theta == pytest.approx(-pose.theta, abs=1e-12)


def test_two_half_steps_compose_to_one_full_step():
    double = RobotCharacteristics(delta_t=2.0 * RC.delta_t)
    rng = np.random.default_rng(6)
    for _ in range(50):
        speeds = WheelSpeeds(*rng.uniform(-1.0, 1.0, 2))
        start = Pose(0.3, -0.2, 0.4)
        twice = step_pose(step_pose(start, speeds, RC), speeds, RC)
        once = step_pose(start, speeds, double)
        assert math.hypot(twice.x - once.x, twice.y - once.y) < 1e-12
        assert abs(wrap_angle(twice.theta - once.theta)) < 1e-12
