"""The three-branch reactive control law over the ternary sensor reading."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinematics import WheelSpeeds
from .sensing import SensorReading

# Column names used whenever the six parameters appear in files, in display
# order: the (left, right) pair for NONE, then KIN, then NONKIN.
PARAM_FIELDS = (
    "none_left",
    "none_right",
    "kin_left",
    "kin_right",
    "nonkin_left",
    "nonkin_right",
)


@dataclass(frozen=True)
class ControllerParams:
    """Six normalized wheel speeds indexed by sensor reading.

    Display order is (left, right) for readings NONE, KIN, NONKIN; config
    files and CSV columns use the same order.
    """

    values: tuple[float, float, float, float, float, float]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if len(values) != 6:
            raise ValueError(f"expected 6 wheel-speed parameters, got {len(values)}")
        for name, v in zip(PARAM_FIELDS, values):
            if not (math.isfinite(v) and -1.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [-1, 1], got {v!r}")
        object.__setattr__(self, "values", values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def wheel_speeds(self, reading: SensorReading | int) -> WheelSpeeds:
        return control(reading, self)


def control(reading: SensorReading | int, params: ControllerParams) -> WheelSpeeds:
    """Wheel speeds for a sensor reading; pure and stateless."""
    i = 2 * int(SensorReading(reading))
    return WheelSpeeds(params.values[i], params.values[i + 1])


def canonical_controller() -> ControllerParams:
    """The best-performing controller: scout clockwise when seeing nothing or
    non-kin, arc counterclockwise toward kin."""
    return ControllerParams((1.0, -2.0 / 3.0, 1.0 / 3.0, 1.0, 1.0, 0.0))
