"""Ternary kin/non-kin sensing with a cone beam.

A robot's sensor selects at most one target among the robots whose center
falls inside its beam and reports NONE, KIN, or NONKIN.  All functions read
an immutable world snapshot, so concurrent evaluation within a tick cannot
observe mid-tick state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum, unique
from typing import Iterable

import numpy as np

from .kinematics import Pose, RobotCharacteristics, wrap_angles

# A zero-aperture beam degenerates to a ray; targets still count when their
# angular offset is exactly zero up to this window.
RAY_EPS = 1e-12


@unique
class SensorReading(IntEnum):
    """What the sensor reports about the selected target."""

    NONE = 0
    KIN = 1
    NONKIN = 2


@unique
class SensorPolicy(Enum):
    """How the target is selected among beam candidates."""

    CLOSEST = "closest"
    KIN_PREFERRED = "kin_preferred"


@dataclass(frozen=True)
class SensorConfig:
    """Beam half-aperture (radians), optional range cap, selection policy.

    max_range=None means unlimited range; 0.0 is a blind sensor (useful for
    range-degradation experiments).
    """

    half_beam_angle: float = math.radians(15.0)
    max_range: float | None = None
    policy: SensorPolicy = SensorPolicy.CLOSEST

    def __post_init__(self) -> None:
        if not (math.isfinite(self.half_beam_angle) and 0.0 <= self.half_beam_angle <= math.pi):
            raise ValueError(
                f"half_beam_angle must lie in [0, pi], got {self.half_beam_angle!r}"
            )
        if self.max_range is not None and not (
            math.isfinite(self.max_range) and self.max_range >= 0.0
        ):
            raise ValueError(f"max_range must be >= 0 or None, got {self.max_range!r}")


def beam_candidates(poses: np.ndarray, config: SensorConfig) -> np.ndarray:
    """Boolean (n, n) mask; entry [i, j] marks robot j inside robot i's beam.

    Membership tests the center of j against i's cone and range; a robot is
    never its own candidate.
    """
    poses = np.asarray(poses, dtype=float)
    n = len(poses)
    dx = poses[None, :, 0] - poses[:, None, 0]
    dy = poses[None, :, 1] - poses[:, None, 1]
    offset = np.abs(wrap_angles(np.arctan2(dy, dx) - poses[:, 2][:, None]))
    cutoff = config.half_beam_angle if config.half_beam_angle > 0.0 else RAY_EPS
    mask = offset <= cutoff
    if config.max_range is not None:
        mask &= np.hypot(dx, dy) <= config.max_range
    mask[np.arange(n), np.arange(n)] = False
    return mask


def sense_all(poses: np.ndarray, class_ids: np.ndarray, config: SensorConfig) -> np.ndarray:
    """Readings for every robot against the same world snapshot.

    Returns an (n,) int array of SensorReading values.  Distance ties are
    broken toward the lowest robot index.
    """
    poses = np.asarray(poses, dtype=float)
    class_ids = np.asarray(class_ids)
    n = len(poses)
    readings = np.zeros(n, dtype=np.int64)
    if n <= 1:
        return readings

    dx = poses[None, :, 0] - poses[:, None, 0]
    dy = poses[None, :, 1] - poses[:, None, 1]
    dist = np.hypot(dx, dy)
    offset = np.abs(wrap_angles(np.arctan2(dy, dx) - poses[:, 2][:, None]))
    cutoff = config.half_beam_angle if config.half_beam_angle > 0.0 else RAY_EPS
    candidate = offset <= cutoff
    if config.max_range is not None:
        candidate &= dist <= config.max_range
    idx = np.arange(n)
    candidate[idx, idx] = False

    kin = class_ids[None, :] == class_ids[:, None]
    if config.policy is SensorPolicy.CLOSEST:
        target = np.argmin(np.where(candidate, dist, np.inf), axis=1)
        seen = candidate.any(axis=1)
        target_is_kin = kin[idx, target]
        readings[seen & target_is_kin] = SensorReading.KIN
        readings[seen & ~target_is_kin] = SensorReading.NONKIN
    else:
        seen_kin = (candidate & kin).any(axis=1)
        seen_any = candidate.any(axis=1)
        readings[seen_kin] = SensorReading.KIN
        readings[seen_any & ~seen_kin] = SensorReading.NONKIN
    return readings


def sense(
    observer: int,
    world: object,
    rc: RobotCharacteristics,
    config: SensorConfig,
) -> SensorReading:
    """Reading for one robot.

    world is either a WorldState-like object (with .poses and .class_ids) or
    an iterable of (Pose, class_id) pairs.  rc is accepted for interface
    completeness; the center-point beam model does not depend on body
    geometry.
    """
    poses = getattr(world, "poses", None)
    if poses is not None:
        class_ids = world.class_ids
    else:
        pairs = list(world)
        poses = np.array([[p.x, p.y, p.theta] for p, _ in pairs], dtype=float)
        class_ids = np.array([c for _, c in pairs])
    n = len(poses)
    if not 0 <= observer < n:
        raise IndexError(f"observer index {observer} outside world of {n} robots")
    return SensorReading(int(sense_all(poses, class_ids, config)[observer]))
