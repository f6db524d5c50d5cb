"""Closed-form approach-convergence bounds and their numerical cross-checks.

For each controller branch there is a maximum admissible v_max * delta_t
below which a single control period from the worst-case tangent
configuration moves a robot closer to its kin target.  The bound follows
from the arc geometry: the step must not rotate past the limit angle
2 * atan(D / |R|), where D is the center distance to the target and R the
signed radius of curvature of the branch.

This module also provides the marginal mean-cost tables used to visualize
six-dimensional sweep results as pairwise heatmaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .controller import ControllerParams, canonical_controller, control
from .kinematics import (
    ArcGeometry,
    Pose,
    RobotCharacteristics,
    WheelSpeeds,
    arc_geometry,
    step_pose,
)
from .sensing import SensorReading

# Worst-case center distance between a robot and its kin target, as a
# multiple of the body radius.
TANGENT_DISTANCE_FACTOR = math.sqrt(3.0)

# Condition names follow the sensor reading whose branch they bound.
CONDITIONS = ("S0", "S1", "S2")
_CONDITION_READING = {
    "S0": SensorReading.NONE,
    "S1": SensorReading.KIN,
    "S2": SensorReading.NONKIN,
}


def limit_angle(distance: float, radius: float) -> float:
    """Arc angle beyond which a circling robot starts moving away from a
    target at the given center distance: 2 * atan(distance / |radius|).

    Always in (0, pi) for positive finite inputs.
    """
    if not (math.isfinite(distance) and distance > 0.0):
        raise ValueError(f"target distance must be positive and finite, got {distance!r}")
    if radius == 0.0 or not math.isfinite(radius):
        raise ValueError(f"radius must be nonzero and finite, got {radius!r}")
    return 2.0 * math.atan(distance / abs(radius))


def approach_geometry(
    speeds: WheelSpeeds, rc: RobotCharacteristics, distance: float
) -> ArcGeometry:
    """Arc geometry of a wheel-speed pair annotated with the limit angle
    toward a target at the given center distance."""
    geometry = arc_geometry(speeds, rc)
    return replace(
        geometry,
        limit_angle=limit_angle(distance, geometry.radius),
        target_distance=distance,
    )


@dataclass(frozen=True)
class ConditionBounds:
    """Maximum admissible v_max * delta_t (meters) per controller branch."""

    s0: float
    s1: float
    s2: float

    def bound(self, condition: str) -> float:
        try:
            return {"S0": self.s0, "S1": self.s1, "S2": self.s2}[condition]
        except KeyError:
            raise ValueError(f"unknown condition {condition!r}; expected one of {CONDITIONS}") from None

    def as_dict(self) -> dict[str, float]:
        return {"S0": self.s0, "S1": self.s1, "S2": self.s2}

    @property
    def strictest(self) -> str:
        return min(self.as_dict().items(), key=lambda kv: kv[1])[0]


def condition_bounds_rl(
    body_radius: float, interwheel: float, params: ControllerParams | None = None
) -> ConditionBounds:
    """Closed-form step-size bounds as a pure function of the two lengths.

    Derivation per branch: the step may rotate at most by the limit angle,
    |omega| * delta_t <= 2 * atan(D / |R|) with D = sqrt(3) * r, which bounds
    v_max * delta_t by  2 * atan(D / |R|) * l / |v_right - v_left|.

    Unlike :class:`RobotCharacteristics` this surface does not require the
    wheels to fit inside the body disk, so it can sweep (r, l) freely.
    """
    if not (math.isfinite(body_radius) and body_radius > 0.0):
        raise ValueError(f"body_radius must be positive, got {body_radius!r}")
    if not (math.isfinite(interwheel) and interwheel > 0.0):
        raise ValueError(f"interwheel must be positive, got {interwheel!r}")
    params = params if params is not None else canonical_controller()
    distance = TANGENT_DISTANCE_FACTOR * body_radius
    bounds: dict[SensorReading, float] = {}
    for reading in SensorReading:
        speeds = control(reading, params)
        delta_v = speeds.right - speeds.left
        if delta_v == 0.0:
            raise ValueError(f"branch for {reading.name} does not turn; no finite bound exists")
        radius = 0.5 * interwheel * (speeds.right + speeds.left) / delta_v
        theta = limit_angle(distance, radius)
        bounds[reading] = theta * interwheel / abs(delta_v)
    return ConditionBounds(
        s0=bounds[SensorReading.NONE],
        s1=bounds[SensorReading.KIN],
        s2=bounds[SensorReading.NONKIN],
    )


def condition_bounds(
    rc: RobotCharacteristics, params: ControllerParams | None = None
) -> ConditionBounds:
    """Closed-form step-size bounds for a robot (see :func:`condition_bounds_rl`)."""
    return condition_bounds_rl(rc.body_radius, rc.interwheel, params)


@dataclass(frozen=True)
class ConditionCheck:
    """One-step simulation evidence for or against a closed-form bound."""

    condition: str
    bound: float  # admissible v_max * delta_t, meters
    margin: float
    start_distance: float
    below_distance: float  # distance after one step at (1 - margin) * bound, aimed
    boundary_distance: float  # distance after one step at exactly the bound, aimed
    above_max_distance: float  # worst distance over the heading sweep at (1 + margin) * bound

    @property
    def below_decreases(self) -> bool:
        return self.below_distance < self.start_distance

    @property
    def above_increases(self) -> bool:
        return self.above_max_distance > self.start_distance

    @property
    def boundary_error(self) -> float:
        return abs(self.boundary_distance - self.start_distance)

    @property
    def ok(self) -> bool:
        return self.below_decreases and self.above_increases


def validate_condition_by_simulation(
    rc: RobotCharacteristics,
    condition: str,
    margin: float,
    sweep_points: int = 360,
    params: ControllerParams | None = None,
) -> ConditionCheck:
    """Cross-check a bound with one simulated arc step.

    The target sits dead ahead at the worst-case distance D = sqrt(3) * r.
    At (1 - margin) * bound the aimed step must close the distance; at
    (1 + margin) * bound some initial heading from an even sweep must end up
    farther than D, i.e. past the limit point.
    """
    if not 0.0 < margin < 1.0:
        raise ValueError(f"margin must lie in (0, 1), got {margin!r}")
    params = params if params is not None else canonical_controller()
    speeds = control(_CONDITION_READING[condition], params)
    bound = condition_bounds(rc, params).bound(condition)
    start = TANGENT_DISTANCE_FACTOR * rc.body_radius

    def distance_after(step_budget: float, heading: float) -> float:
        scaled = replace(rc, v_max=step_budget / rc.delta_t)
        stepped = step_pose(Pose(0.0, 0.0, heading), speeds, scaled)
        return math.hypot(stepped.x - start, stepped.y)

    below = distance_after(bound * (1.0 - margin), 0.0)
    boundary = distance_after(bound, 0.0)
    headings = np.linspace(-math.pi, math.pi, sweep_points, endpoint=False)
    above = max(distance_after(bound * (1.0 + margin), float(h)) for h in headings)
    return ConditionCheck(condition, bound, margin, start, below, boundary, above)


@dataclass(frozen=True)
class PairTable:
    """Mean cost marginalized onto one unordered parameter pair.

    Rows follow the lower-index parameter, values ascending; cells without
    any sample are NaN.
    """

    pair: tuple[int, int]
    row_values: tuple[float, ...]
    col_values: tuple[float, ...]
    mean_cost: np.ndarray  # (len(row_values), len(col_values))


def heatmap_marginals(
    results: Iterable[tuple[ControllerParams | Sequence[float], float]],
) -> dict[tuple[int, int], PairTable]:
    """Marginal mean-cost tables for all 15 unordered parameter pairs."""
    rows: list[tuple[tuple[float, ...], float]] = []
    for params, cost in results:
        values = params.values if isinstance(params, ControllerParams) else tuple(params)
        rows.append((tuple(float(v) for v in values), float(cost)))
    if not rows:
        raise ValueError("no sweep results to marginalize")

    tables: dict[tuple[int, int], PairTable] = {}
    for a in range(6):
        for b in range(a + 1, 6):
            row_values = sorted({p[a] for p, _ in rows})
            col_values = sorted({p[b] for p, _ in rows})
            row_index = {v: i for i, v in enumerate(row_values)}
            col_index = {v: j for j, v in enumerate(col_values)}
            sums = np.zeros((len(row_values), len(col_values)))
            counts = np.zeros_like(sums)
            for p, cost in rows:
                i, j = row_index[p[a]], col_index[p[b]]
                sums[i, j] += cost
                counts[i, j] += 1
            mean = np.where(counts > 0, sums / np.maximum(counts, 1.0), np.nan)
            tables[(a, b)] = PairTable((a, b), tuple(row_values), tuple(col_values), mean)
    return tables
