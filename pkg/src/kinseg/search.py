"""Parallel grid sweeps with checkpointing, plus the experiment suites.

Sweep evaluation is a work queue of independent (parameter set x bank
configuration) cells.  Each cell's trial seed is fixed by the bank, so
results are bitwise identical for any worker count and survive
kill-and-resume through the append-only checkpoint file.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import stats

from .controller import PARAM_FIELDS, ControllerParams, canonical_controller
from .engine import (
    ClusterInit,
    LineInit,
    TrialConfig,
    UniformRandomInit,
    run_trial,
)
from .kinematics import RobotCharacteristics
from .metrics import DEFAULT_EPSILON
from .sensing import SensorConfig, SensorPolicy

BANK_VERSION = "kinseg-bank-1"

# Diagonal of the 5 m placement square; a sensor of this range is effectively
# unlimited, and range experiments express their setting as a fraction of it.
UNLIMITED_RANGE_M = 7.07

CHECKPOINT_HEADER = "cell_id," + ",".join(PARAM_FIELDS) + ",config_id,c_total,seed"


def grid_axis(points: int) -> np.ndarray:
    """Evenly spaced lattice over [-1, 1].

    Computed as (2k - (points - 1)) / (points - 1) so that small rationals
    such as 1/3 and 2/3 are hit exactly; the canonical controller is then a
    lattice point of the 7-value grid.
    """
    if points < 2:
        raise ValueError(f"need at least 2 grid values per axis, got {points}")
    return np.array([(2 * k - (points - 1)) / (points - 1) for k in range(points)])


def derive_seed(*parts: int) -> int:
    """Stable 64-bit seed derived from a tuple of integers."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


def config_bank(
    master_seed: int,
    n_uniform: int = 18,
    n_clusters: int = 10,
    n_lines: int = 10,
    *,
    classes: Sequence[int] = (10, 10, 10),
    side: float = 5.0,
    duration: float = 100.0,
    robot: RobotCharacteristics | None = None,
    sensor: SensorConfig | None = None,
    metric_epsilon: float = DEFAULT_EPSILON,
) -> list[TrialConfig]:
    """The versioned bank of initial configurations a sweep evaluates.

    Defaults to 18 uniform-random, 10 clustered, and 10 line placements, all
    seeded from the master seed so the bank is reproducible.
    """
    robot = robot if robot is not None else RobotCharacteristics()
    sensor = sensor if sensor is not None else SensorConfig()
    inits: list = []
    inits += [UniformRandomInit(side)] * n_uniform
    inits += [ClusterInit(side)] * n_clusters
    inits += [LineInit(side)] * n_lines
    bank = []
    for index, init in enumerate(inits):
        bank.append(
            TrialConfig(
                seed=derive_seed(master_seed, index),
                params=canonical_controller(),
                robot=robot,
                sensor=sensor,
                classes=tuple(classes),
                init=init,
                duration=duration,
                metric_epsilon=metric_epsilon,
            )
        )
    return bank


@dataclass(frozen=True)
class SweepConfig:
    """A grid sweep: every lattice parameter set against every bank config."""

    bank: tuple[TrialConfig, ...]
    axis_points: int = 7
    workers: int = 1
    master_seed: int = 0
    checkpoint: str | Path | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "bank", tuple(self.bank))
        if not self.bank:
            raise ValueError("sweep needs at least one bank configuration")
        if self.axis_points < 2:
            raise ValueError(f"axis_points must be >= 2, got {self.axis_points}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    @property
    def n_param_sets(self) -> int:
        return self.axis_points**6

    @property
    def n_cells(self) -> int:
        return self.n_param_sets * len(self.bank)


@dataclass
class SweepResult:
    """Mean cost per parameter set plus provenance."""

    axis_values: tuple[float, ...]
    param_sets: np.ndarray  # (P, 6), lexicographic enumeration order
    mean_cost: np.ndarray  # (P,)
    order: np.ndarray  # parameter-set indices, best (lowest mean cost) first
    master_seed: int
    bank_size: int
    bank_version: str = BANK_VERSION

    @property
    def best_params(self) -> ControllerParams:
        return ControllerParams(tuple(self.param_sets[int(self.order[0])]))

    @property
    def best_cost(self) -> float:
        return float(self.mean_cost[int(self.order[0])])

    def ranked(self) -> Iterator[tuple[np.ndarray, float]]:
        for index in self.order:
            yield self.param_sets[int(index)], float(self.mean_cost[int(index)])


def _trial_cost(cfg: TrialConfig) -> float:
    return run_trial(cfg).c_total


def _evaluate(configs: Sequence[TrialConfig], workers: int) -> list[float]:
    """Costs for a batch of trial configs, in input order."""
    if workers <= 1 or len(configs) <= 1:
        return [_trial_cost(cfg) for cfg in configs]
    chunk = max(1, len(configs) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_trial_cost, configs, chunksize=chunk))


def _load_checkpoint(path: Path, param_sets: np.ndarray, bank_size: int) -> dict[int, float]:
    """Completed cells from an append-only checkpoint.

    A partially written trailing line (killed run) is ignored; rows whose
    parameters disagree with the current grid are a configuration error.
    """
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        return {}
    if lines[0] != CHECKPOINT_HEADER:
        raise ValueError(f"checkpoint {path} has an unexpected header; refusing to resume")
    done: dict[int, float] = {}
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 10:
            continue
        try:
            cell_id = int(parts[0])
            values = [float(v) for v in parts[1:7]]
            config_id = int(parts[7])
            cost = float(parts[8])
        except ValueError:
            continue
        param_index, expected_config = divmod(cell_id, bank_size)
        if param_index >= len(param_sets) or config_id != expected_config:
            raise ValueError(f"checkpoint {path} does not match this sweep's grid or bank")
        if values != list(param_sets[param_index]):
            raise ValueError(f"checkpoint {path} was written for different grid values")
        done[cell_id] = cost
    return done


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate the full lattice on the bank; resumes from the checkpoint.

    The result is a fold over per-cell costs keyed by cell id, so it is
    independent of worker count and completion order.
    """
    axis = grid_axis(config.axis_points)
    param_sets = np.array(list(itertools.product(axis, repeat=6)))
    bank = config.bank
    bank_size = len(bank)

    checkpoint = Path(config.checkpoint) if config.checkpoint is not None else None
    done: dict[int, float] = {}
    if checkpoint is not None and checkpoint.exists():
        done = _load_checkpoint(checkpoint, param_sets, bank_size)

    pending = [cid for cid in range(len(param_sets) * bank_size) if cid not in done]
    if pending:
        configs = [
            replace(
                bank[cid % bank_size],
                params=ControllerParams(tuple(param_sets[cid // bank_size])),
            )
            for cid in pending
        ]
        sink = None
        if checkpoint is not None:
            fresh = not checkpoint.exists()
            sink = open(checkpoint, "a", encoding="utf-8", newline="\n")
            if fresh:
                sink.write(CHECKPOINT_HEADER + "\n")
                sink.flush()
        try:
            if config.workers <= 1:
                costs: Iterable[float] = map(_trial_cost, configs)
            else:
                chunk = max(1, len(configs) // (config.workers * 4))
                pool = ProcessPoolExecutor(max_workers=config.workers)
                costs = pool.map(_trial_cost, configs, chunksize=chunk)
            for cell_id, cost in zip(pending, costs):
                done[cell_id] = cost
                if sink is not None:
                    values = ",".join(repr(float(v)) for v in param_sets[cell_id // bank_size])
                    seed = bank[cell_id % bank_size].seed
                    sink.write(f"{cell_id},{values},{cell_id % bank_size},{cost!r},{seed}\n")
                    sink.flush()
            if config.workers > 1:
                pool.shutdown()
        finally:
            if sink is not None:
                sink.close()

    costs_by_set = np.array(
        [[done[pi * bank_size + ci] for ci in range(bank_size)] for pi in range(len(param_sets))]
    )
    mean_cost = costs_by_set.mean(axis=1)
    order = np.argsort(mean_cost, kind="stable")
    return SweepResult(
        axis_values=tuple(float(v) for v in axis),
        param_sets=param_sets,
        mean_cost=mean_cost,
        order=order,
        master_seed=config.master_seed,
        bank_size=bank_size,
    )


@dataclass(frozen=True)
class ExperimentPoint:
    """Mean cost with a confidence interval for one experiment setting."""

    setting: float
    mean_cost: float
    ci_low: float
    ci_high: float
    n_trials: int
    costs: tuple[float, ...]


def mean_ci(values: Sequence[float], confidence: float = 0.95) -> tuple[float, float, float]:
    """Sample mean and t-distribution confidence interval."""
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    if len(arr) < 2 or float(arr.std()) == 0.0:
        return mean, mean, mean
    low, high = stats.t.interval(confidence, len(arr) - 1, loc=mean, scale=stats.sem(arr))
    return mean, float(low), float(high)


def _point(setting: float, costs: Sequence[float]) -> ExperimentPoint:
    mean, low, high = mean_ci(costs)
    return ExperimentPoint(setting, mean, low, high, len(costs), tuple(float(c) for c in costs))


def split_total(total: int, n_classes: int) -> tuple[int, ...]:
    """Split a robot count across classes as evenly as possible; the
    remainder goes one robot at a time to the lowest class ids."""
    if n_classes < 1:
        raise ValueError("need at least one class")
    base, remainder = divmod(total, n_classes)
    if base < 1:
        raise ValueError(f"cannot split {total} robots into {n_classes} non-empty classes")
    return tuple(base + 1 if k < remainder else base for k in range(n_classes))


def experiment_scalability(
    class_counts: Sequence[int],
    trials: int,
    mode: str = "fixed_per_class",
    *,
    per_class: int = 10,
    total: int = 100,
    master_seed: int = 0,
    workers: int = 1,
    side: float = 5.0,
    duration: float = 100.0,
    robot: RobotCharacteristics | None = None,
    sensor: SensorConfig | None = None,
) -> list[ExperimentPoint]:
    """Mean cost versus number of classes, canonical controller, uniform init."""
    if mode not in ("fixed_per_class", "fixed_total"):
        raise ValueError(f"mode must be fixed_per_class or fixed_total, got {mode!r}")
    robot = robot if robot is not None else RobotCharacteristics()
    sensor = sensor if sensor is not None else SensorConfig()
    points = []
    for n_classes in class_counts:
        if mode == "fixed_per_class":
            classes = (per_class,) * n_classes
        else:
            classes = split_total(total, n_classes)
        configs = [
            TrialConfig(
                seed=derive_seed(master_seed, n_classes, t),
                robot=robot,
                sensor=sensor,
                classes=classes,
                init=UniformRandomInit(side),
                duration=duration,
            )
            for t in range(trials)
        ]
        points.append(_point(float(n_classes), _evaluate(configs, workers)))
    return points


def experiment_beam_angle(
    betas_deg: Sequence[float],
    trials: int,
    *,
    classes: Sequence[int] = (10, 10, 10, 10),
    master_seed: int = 0,
    workers: int = 1,
    side: float = 5.0,
    duration: float = 100.0,
    robot: RobotCharacteristics | None = None,
    max_range: float | None = None,
    policy: SensorPolicy = SensorPolicy.CLOSEST,
) -> list[ExperimentPoint]:
    """Mean cost per beam half-angle; the same seeds are reused across
    settings so comparisons are paired."""
    robot = robot if robot is not None else RobotCharacteristics()
    points = []
    for beta in betas_deg:
        sensor = SensorConfig(math.radians(beta), max_range, policy)
        configs = [
            TrialConfig(
                seed=derive_seed(master_seed, t),
                robot=robot,
                sensor=sensor,
                classes=tuple(classes),
                init=UniformRandomInit(side),
                duration=duration,
            )
            for t in range(trials)
        ]
        points.append(_point(float(beta), _evaluate(configs, workers)))
    return points


def experiment_beam_range(
    fractions: Sequence[float],
    trials: int,
    *,
    beta_deg: float = 15.0,
    full_range: float = UNLIMITED_RANGE_M,
    classes: Sequence[int] = (10, 10, 10, 10),
    master_seed: int = 0,
    workers: int = 1,
    side: float = 5.0,
    duration: float = 100.0,
    robot: RobotCharacteristics | None = None,
    policy: SensorPolicy = SensorPolicy.CLOSEST,
) -> list[ExperimentPoint]:
    """Mean cost per beam range expressed as a fraction of the effectively
    unlimited range; fraction 0 is a blind sensor."""
    robot = robot if robot is not None else RobotCharacteristics()
    points = []
    for fraction in fractions:
        sensor = SensorConfig(math.radians(beta_deg), full_range * fraction, policy)
        configs = [
            TrialConfig(
                seed=derive_seed(master_seed, t),
                robot=robot,
                sensor=sensor,
                classes=tuple(classes),
                init=UniformRandomInit(side),
                duration=duration,
            )
            for t in range(trials)
        ]
        points.append(_point(float(fraction), _evaluate(configs, workers)))
    return points
