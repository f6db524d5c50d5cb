"""World stepping: synchronized sense-control-move loop with rigid disks.

A trial is a pure function of its configuration: identical seed and config
produce bit-identical worlds, cost series, and trajectories, in any process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .controller import ControllerParams, canonical_controller
from .kinematics import Pose, RobotCharacteristics, step_poses, wrap_angles
from .metrics import DEFAULT_EPSILON, gamma_at, total_cost
from .sensing import SensorConfig, sense_all

COLLISION_TOL = 1e-6  # residual pairwise overlap allowed after a tick
MAX_COLLISION_ITERS = 64
MAX_PLACEMENT_ATTEMPTS = 100_000


class SimulationError(RuntimeError):
    """Base class for failures inside a running simulation."""


class PlacementError(SimulationError):
    """Initial placement could not be sampled (arena too crowded)."""


class CollisionError(SimulationError):
    """Disk separation failed to converge (pathological density)."""


@dataclass
class WorldState:
    """Snapshot of every robot; robot ids are the row indices 0..n-1.

    The arrays are treated as immutable between ticks; stepping returns a
    new WorldState.
    """

    class_ids: np.ndarray  # (n,) int
    poses: np.ndarray  # (n, 3) float: x, y, heading
    time: float = 0.0

    def __post_init__(self) -> None:
        self.class_ids = np.asarray(self.class_ids, dtype=np.int64)
        self.poses = np.asarray(self.poses, dtype=float)
        if self.poses.ndim != 2 or self.poses.shape[1] != 3:
            raise ValueError("poses must be an (n, 3) array")
        if len(self.poses) != len(self.class_ids):
            raise ValueError("poses and class_ids must have the same length")

    @property
    def n(self) -> int:
        return len(self.class_ids)

    def robots(self) -> Iterator[tuple[int, int, Pose]]:
        for i in range(self.n):
            x, y, theta = self.poses[i]
            yield i, int(self.class_ids[i]), Pose(float(x), float(y), float(theta))

    def copy(self) -> "WorldState":
        return WorldState(self.class_ids.copy(), self.poses.copy(), self.time)


@dataclass(frozen=True)
class UniformRandomInit:
    """Collision-free uniform placement inside a centered square."""

    side: float = 5.0

    def __post_init__(self) -> None:
        if not self.side > 0.0:
            raise ValueError(f"side must be positive, got {self.side!r}")


@dataclass(frozen=True)
class ClusterInit:
    """One Gaussian blob per class; the first robot sits at the blob center."""

    side: float = 5.0
    sigma: float = 0.5

    def __post_init__(self) -> None:
        if not self.side > 0.0:
            raise ValueError(f"side must be positive, got {self.side!r}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True)
class LineInit:
    """One horizontal row per class; pitch defaults to the cluster-adjacency
    threshold 2r + epsilon so rows start connected."""

    side: float = 5.0
    pitch: float | None = None

    def __post_init__(self) -> None:
        if not self.side > 0.0:
            raise ValueError(f"side must be positive, got {self.side!r}")
        if self.pitch is not None and not self.pitch > 0.0:
            raise ValueError(f"pitch must be positive, got {self.pitch!r}")


InitSpec = Union[UniformRandomInit, ClusterInit, LineInit]

_INIT_LABELS = {
    UniformRandomInit: "uniform_random",
    ClusterInit: "clusters",
    LineInit: "lines",
}


def init_kind_label(init: InitSpec) -> str:
    return _INIT_LABELS[type(init)]


@dataclass(frozen=True)
class TrialConfig:
    """Everything needed to reproduce one trial bit for bit."""

    seed: int = 0
    params: ControllerParams = canonical_controller()
    robot: RobotCharacteristics = RobotCharacteristics()
    sensor: SensorConfig = SensorConfig()
    classes: tuple[int, ...] = (10, 10, 10)
    init: InitSpec = UniformRandomInit()
    duration: float = 100.0
    metric_epsilon: float = DEFAULT_EPSILON

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "classes", tuple(int(c) for c in self.classes))
        if not self.classes or any(c < 1 for c in self.classes):
            raise ValueError("every class needs at least one robot")
        if not (math.isfinite(self.duration) and self.duration > 0.0):
            raise ValueError(f"duration must be positive, got {self.duration!r}")
        if not self.metric_epsilon > 0.0:
            raise ValueError(f"metric_epsilon must be positive, got {self.metric_epsilon!r}")

    @property
    def n_robots(self) -> int:
        return sum(self.classes)

    @property
    def ticks(self) -> int:
        return math.ceil(self.duration / self.robot.delta_t - 1e-9)

    @property
    def gamma_samples(self) -> int:
        """Number of whole-second cost samples: t = 0 .. ceil(duration) - 1."""
        return math.ceil(self.duration - 1e-9)


def _sample_ticks(cfg: TrialConfig) -> list[int]:
    """First tick whose time reaches each whole second t; nondecreasing."""
    dt = cfg.robot.delta_t
    return [math.ceil(s / dt - 1e-9) for s in range(cfg.gamma_samples)]


class _PlacementBudget:
    def __init__(self, limit: int, what: str) -> None:
        self.left = limit
        self.what = what

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise PlacementError(f"placement failed after {MAX_PLACEMENT_ATTEMPTS} attempts: {self.what}")


def _clear_of(placed: np.ndarray, count: int, point: np.ndarray, min_dist: float) -> bool:
    if count == 0:
        return True
    d = np.hypot(placed[:count, 0] - point[0], placed[:count, 1] - point[1])
    return bool((d >= min_dist).all())


def _place_uniform(counts: tuple[int, ...], side: float, r: float, rng: np.random.Generator) -> np.ndarray:
    n = sum(counts)
    half = 0.5 * side
    budget = _PlacementBudget(MAX_PLACEMENT_ATTEMPTS, f"{n} robots in a {side} m square")
    placed = np.empty((n, 2))
    count = 0
    while count < n:
        budget.spend()
        p = rng.uniform(-half, half, 2)
        if _clear_of(placed, count, p, 2.0 * r):
            placed[count] = p
            count += 1
    return placed


def _place_clusters(
    counts: tuple[int, ...], side: float, sigma: float, r: float, rng: np.random.Generator
) -> np.ndarray:
    n = sum(counts)
    half = 0.5 * side
    budget = _PlacementBudget(MAX_PLACEMENT_ATTEMPTS, f"{len(counts)} blobs in a {side} m square")
    placed = np.empty((n, 2))
    count = 0
    for c in counts:
        # blob center doubles as the first robot of the class
        while True:
            budget.spend()
            center = rng.uniform(-half, half, 2)
            if _clear_of(placed, count, center, 2.0 * r):
                placed[count] = center
                count += 1
                break
        for _ in range(c - 1):
            while True:
                budget.spend()
                p = center + rng.normal(0.0, sigma, 2)
                if (np.abs(p) <= half).all() and _clear_of(placed, count, p, 2.0 * r):
                    placed[count] = p
                    count += 1
                    break
    return placed


def _place_lines(
    counts: tuple[int, ...],
    side: float,
    pitch: float,
    r: float,
    rng: np.random.Generator,
) -> np.ndarray:
    if pitch < 2.0 * r:
        raise PlacementError(f"row pitch {pitch} is below the robot diameter {2.0 * r}")
    n = sum(counts)
    half = 0.5 * side
    n_classes = len(counts)
    budget = _PlacementBudget(MAX_PLACEMENT_ATTEMPTS, f"{n_classes} rows in a {side} m square")
    placed = np.empty((n, 2))
    count = 0
    for k, c in enumerate(counts):
        width = (c - 1) * pitch
        if width > side:
            raise PlacementError(f"row of {c} robots at pitch {pitch} does not fit in {side} m")
        y = -half + side * (k + 1) / (n_classes + 1)
        while True:
            budget.spend()
            x0 = rng.uniform(-half, half - width)
            xs = x0 + pitch * np.arange(c)
            row = np.column_stack([xs, np.full(c, y)])
            if count == 0 or all(_clear_of(placed, count, p, 2.0 * r) for p in row):
                placed[count : count + c] = row
                count += c
                break
    return placed


def init_world(cfg: TrialConfig) -> WorldState:
    """Seeded initial configuration; collision-free, headings uniform."""
    rng = np.random.default_rng(cfg.seed)
    r = cfg.robot.body_radius
    init = cfg.init
    if isinstance(init, UniformRandomInit):
        positions = _place_uniform(cfg.classes, init.side, r, rng)
    elif isinstance(init, ClusterInit):
        positions = _place_clusters(cfg.classes, init.side, init.sigma, r, rng)
    elif isinstance(init, LineInit):
        pitch = init.pitch if init.pitch is not None else 2.0 * r + cfg.metric_epsilon
        positions = _place_lines(cfg.classes, init.side, pitch, r, rng)
    else:
        raise TypeError(f"unknown init spec {init!r}")
    headings = wrap_angles(rng.uniform(-math.pi, math.pi, size=len(positions)))
    class_ids = np.repeat(np.arange(len(cfg.classes)), cfg.classes)
    return WorldState(class_ids, np.column_stack([positions, headings]), 0.0)


_PAIR_INDEX_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = _PAIR_INDEX_CACHE.get(n)
    if pairs is None:
        pairs = np.triu_indices(n, k=1)
        _PAIR_INDEX_CACHE[n] = pairs
    return pairs


def _resolve_overlaps(poses: np.ndarray, min_dist: float) -> None:
    """Separate overlapping disks symmetrically along their center lines.

    Jacobi-style iteration: all corrections of a pass are computed from the
    same positions, which keeps the result equivariant under robot
    permutations.  Mutates poses[:, :2] in place.
    """
    xy = poses[:, :2]
    n = len(xy)
    if n < 2:
        return
    # Project violating pairs slightly past tangency; without the headroom,
    # corrections in contact chains push neighbors back across the tolerance
    # threshold and the iteration stalls there.  Long cascades in dense packs
    # get a wider (still sub-millimeter) slack after half the iteration
    # budget; the escalation depends only on the iteration counter, so the
    # result stays deterministic.
    cutoff = min_dist - COLLISION_TOL
    iu, ju = _pair_indices(n)
    for iteration in range(MAX_COLLISION_ITERS):
        slack = 50.0 if iteration < MAX_COLLISION_ITERS // 2 else 400.0
        target = min_dist + slack * COLLISION_TOL
        dx = xy[iu, 0] - xy[ju, 0]
        dy = xy[iu, 1] - xy[ju, 1]
        d = np.hypot(dx, dy)
        violating = d < cutoff
        if not violating.any():
            return
        vi = iu[violating]
        vj = ju[violating]
        dv = d[violating]
        d_safe = np.where(dv > 0.0, dv, 1.0)
        # coincident centers get a deterministic push along +x
        ux = np.where(dv > 0.0, dx[violating] / d_safe, 1.0)
        uy = np.where(dv > 0.0, dy[violating] / d_safe, 0.0)
        push = 0.5 * (target - dv)
        px = ux * push
        py = uy * push
        xy[:, 0] += np.bincount(vi, px, minlength=n) - np.bincount(vj, px, minlength=n)
        xy[:, 1] += np.bincount(vi, py, minlength=n) - np.bincount(vj, py, minlength=n)
    d = np.hypot(xy[iu, 0] - xy[ju, 0], xy[iu, 1] - xy[ju, 1])
    worst = float((min_dist - d).max())
    if worst > COLLISION_TOL:
        raise CollisionError(
            f"collision resolution did not converge in {MAX_COLLISION_ITERS} iterations "
            f"(residual overlap {worst:.3e} m)"
        )


def _tick(world: WorldState, cfg: TrialConfig) -> tuple[WorldState, np.ndarray]:
    """One synchronized tick; returns the new world and the readings used."""
    readings = sense_all(world.poses, world.class_ids, cfg.sensor)
    speeds = cfg.params.as_array()
    left = speeds[2 * readings]
    right = speeds[2 * readings + 1]
    poses = step_poses(world.poses, left, right, cfg.robot)
    _resolve_overlaps(poses, 2.0 * cfg.robot.body_radius)
    return WorldState(world.class_ids, poses, world.time + cfg.robot.delta_t), readings


def step_world(world: WorldState, cfg: TrialConfig) -> WorldState:
    """Advance one control period; all robots sense the same pre-tick snapshot."""
    return _tick(world, cfg)[0]


@dataclass
class Trajectory:
    """Per-tick log: start-of-tick poses and the readings that drove the tick."""

    times: np.ndarray  # (ticks,)
    poses: np.ndarray  # (ticks, n, 3)
    readings: np.ndarray  # (ticks, n)


@dataclass
class TrialResult:
    """Cost series, final world, and optional trajectory of one trial."""

    config: TrialConfig
    gamma: np.ndarray  # one sample per whole simulated second
    c_total: float
    final: WorldState
    trajectory: Trajectory | None = None


def run_trial(cfg: TrialConfig, record_trajectory: bool = False) -> TrialResult:
    """Run a seeded trial for ceil(duration / delta_t) ticks.

    gamma is sampled at every whole simulated second t = 0 .. T-1 (first tick
    whose time reaches t); c_total is the t-weighted sum of those samples.
    """
    world = init_world(cfg)
    ticks = cfg.ticks
    sample_ticks = _sample_ticks(cfg)
    gamma = np.zeros(cfg.gamma_samples)
    next_sample = 0

    trajectory = None
    if record_trajectory:
        trajectory = Trajectory(
            times=np.zeros(ticks),
            poses=np.zeros((ticks, world.n, 3)),
            readings=np.zeros((ticks, world.n), dtype=np.int64),
        )

    for k in range(ticks + 1):
        while next_sample < len(sample_ticks) and sample_ticks[next_sample] == k:
            gamma[next_sample] = gamma_at(world, cfg.robot.body_radius, cfg.metric_epsilon)
            next_sample += 1
        if k == ticks:
            break
        if trajectory is not None:
            trajectory.times[k] = world.time
            trajectory.poses[k] = world.poses
        world, readings = _tick(world, cfg)
        if trajectory is not None:
            trajectory.readings[k] = readings

    return TrialResult(cfg, gamma, total_cost(gamma), world, trajectory)


def write_trajectory(result: TrialResult, path) -> None:
    """Write newline-delimited per-(tick, robot) records.

    Columns: t,robot_id,class_id,x,y,theta,S with floats at 9 significant
    digits.
    """
    trajectory = result.trajectory
    if trajectory is None:
        raise ValueError("trial was run without trajectory recording")
    class_ids = result.final.class_ids
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,robot_id,class_id,x,y,theta,S\n")
        for k in range(len(trajectory.times)):
            t = trajectory.times[k]
            for i in range(len(class_ids)):
                x, y, theta = trajectory.poses[k, i]
                fh.write(
                    f"{t:.9g},{i},{class_ids[i]},{x:.9g},{y:.9g},{theta:.9g},"
                    f"{trajectory.readings[k, i]}\n"
                )
