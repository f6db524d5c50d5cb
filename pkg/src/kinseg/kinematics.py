"""Differential-drive kinematics: exact arc propagation of planar poses.

Wheel speeds are dimensionless in [-1, 1]; a robot's characteristics map them
to physical speeds and fix the control period.  Every function here is pure
and safe to call from concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi

# Below this wheel-speed difference the arc radius cancels catastrophically;
# the step is taken along a straight segment instead.
STRAIGHT_EPS = 1e-12


def wrap_angle(theta: float) -> float:
    """Wrap a scalar angle into (-pi, pi]."""
    return math.pi - (math.pi - theta) % TWO_PI


def wrap_angles(theta: np.ndarray) -> np.ndarray:
    """Vectorized :func:`wrap_angle`; same floor-mod formula, same results."""
    return np.pi - np.mod(np.pi - np.asarray(theta), TWO_PI)


class WheelSpeeds(NamedTuple):
    """Normalized left/right wheel speeds, each expected in [-1, 1]."""

    left: float
    right: float


@dataclass(frozen=True)
class Pose:
    """Planar position and heading; the heading is kept in (-pi, pi]."""

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "theta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"pose field {name} must be finite, got {value!r}")
        if not (-math.pi < self.theta <= math.pi):
            object.__setattr__(self, "theta", wrap_angle(self.theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta], dtype=float)


@dataclass(frozen=True)
class RobotCharacteristics:
    """Body geometry and drive limits shared by every robot in a world.

    body_radius and interwheel are meters (the wheels must fit inside the
    body disk), v_max is the physical speed a normalized wheel speed of 1
    maps to, and delta_t is the control period in seconds.
    """

    body_radius: float = 0.085
    interwheel: float = 0.14
    v_max: float = 0.3
    delta_t: float = 0.1

    def __post_init__(self) -> None:
        for name in ("body_radius", "interwheel", "v_max", "delta_t"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.interwheel > 2.0 * self.body_radius:
            raise ValueError(
                f"interwheel distance {self.interwheel} exceeds the body diameter "
                f"{2.0 * self.body_radius}"
            )


@dataclass(frozen=True)
class ArcGeometry:
    """Instantaneous arc described by one constant-speed control period.

    radius is signed: positive when the center of curvature lies to the
    robot's left (counterclockwise turn).  Straight-line motion is reported
    with radius = math.inf and omega = 0.  limit_angle and target_distance
    are filled in by the convergence analysis when a target is involved.
    """

    radius: float
    omega: float
    limit_angle: float | None = None
    target_distance: float | None = None

    @property
    def straight(self) -> bool:
        return math.isinf(self.radius)


def to_physical(speeds: WheelSpeeds, rc: RobotCharacteristics) -> tuple[float, float]:
    """Map normalized wheel speeds to physical speeds in m/s."""
    left, right = speeds
    return rc.v_max * left, rc.v_max * right


def arc_geometry(speeds: WheelSpeeds, rc: RobotCharacteristics) -> ArcGeometry:
    """Signed radius of curvature and angular rate for a wheel-speed pair.

    Equal wheel speeds (within STRAIGHT_EPS) are reported as straight-line
    motion rather than raising.
    """
    left, right = speeds
    dv = right - left
    if abs(dv) < STRAIGHT_EPS:
        return ArcGeometry(radius=math.inf, omega=0.0)
    radius = 0.5 * rc.interwheel * (right + left) / dv
    omega = rc.v_max * dv / rc.interwheel
    return ArcGeometry(radius=radius, omega=omega)


def step_poses(
    poses: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    rc: RobotCharacteristics,
) -> np.ndarray:
    """Advance an (n, 3) pose array by one control period along exact arcs.

    Each robot rotates about its instantaneous center of curvature by
    omega * delta_t; robots with equal wheel speeds translate along their
    heading instead.
    """
    poses = np.asarray(poses, dtype=float)
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    x, y, theta = poses[:, 0], poses[:, 1], poses[:, 2]

    dv = right - left
    going_straight = np.abs(dv) < STRAIGHT_EPS
    dv_safe = np.where(going_straight, 1.0, dv)
    radius = 0.5 * rc.interwheel * (right + left) / dv_safe
    omega = rc.v_max * dv / rc.interwheel
    theta_arc = theta + omega * rc.delta_t

    sin_t = np.sin(theta)
    cos_t = np.cos(theta)
    arc_x = x + radius * (np.sin(theta_arc) - sin_t)
    arc_y = y - radius * (np.cos(theta_arc) - cos_t)

    run = rc.v_max * left * rc.delta_t
    straight_x = x + run * cos_t
    straight_y = y + run * sin_t

    out = np.empty_like(poses)
    out[:, 0] = np.where(going_straight, straight_x, arc_x)
    out[:, 1] = np.where(going_straight, straight_y, arc_y)
    out[:, 2] = np.where(going_straight, theta, wrap_angles(theta_arc))
    return out


def step_pose(pose: Pose, speeds: WheelSpeeds, rc: RobotCharacteristics) -> Pose:
    """Advance a single pose by one control period (see :func:`step_poses`)."""
    stepped = step_poses(
        pose.as_array()[None, :],
        np.array([speeds[0]], dtype=float),
        np.array([speeds[1]], dtype=float),
        rc,
    )
    return Pose(float(stepped[0, 0]), float(stepped[0, 1]), float(stepped[0, 2]))
