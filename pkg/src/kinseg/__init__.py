"""Deterministic simulator and analysis toolkit for minimalistic N-class
segregation in robot swarms.

Robots follow a differential-drive model, carry a ternary kin/non-kin cone
sensor, and map its reading straight to wheel speeds through a six-parameter
reactive controller.  The package provides the headless tick engine, cluster
cost metrics, closed-form convergence bounds, and a parallel grid-search
harness with experiment suites.
"""

__version__ = "0.1.0"

from .analysis import (
    ConditionBounds,
    ConditionCheck,
    PairTable,
    approach_geometry,
    condition_bounds,
    condition_bounds_rl,
    heatmap_marginals,
    limit_angle,
    validate_condition_by_simulation,
)
from .controller import PARAM_FIELDS, ControllerParams, canonical_controller, control
from .engine import (
    ClusterInit,
    CollisionError,
    LineInit,
    PlacementError,
    SimulationError,
    TrialConfig,
    TrialResult,
    Trajectory,
    UniformRandomInit,
    WorldState,
    init_world,
    run_trial,
    step_world,
    write_trajectory,
)
from .kinematics import (
    ArcGeometry,
    Pose,
    RobotCharacteristics,
    WheelSpeeds,
    arc_geometry,
    step_pose,
    step_poses,
    to_physical,
    wrap_angle,
)
from .metrics import ClusterReport, CostSeries, find_clusters, gamma_at, total_cost
from .search import (
    ExperimentPoint,
    SweepConfig,
    SweepResult,
    config_bank,
    derive_seed,
    experiment_beam_angle,
    experiment_beam_range,
    experiment_scalability,
    grid_axis,
    mean_ci,
    run_sweep,
    split_total,
)
from .sensing import SensorConfig, SensorPolicy, SensorReading, beam_candidates, sense, sense_all

__all__ = [
    "__version__",
    "ArcGeometry",
    "ClusterInit",
    "ClusterReport",
    "CollisionError",
    "ConditionBounds",
    "ConditionCheck",
    "ControllerParams",
    "CostSeries",
    "ExperimentPoint",
    "LineInit",
    "PARAM_FIELDS",
    "PairTable",
    "PlacementError",
    "Pose",
    "RobotCharacteristics",
    "SensorConfig",
    "SensorPolicy",
    "SensorReading",
    "SimulationError",
    "SweepConfig",
    "SweepResult",
    "Trajectory",
    "TrialConfig",
    "TrialResult",
    "UniformRandomInit",
    "WheelSpeeds",
    "WorldState",
    "approach_geometry",
    "arc_geometry",
    "beam_candidates",
    "canonical_controller",
    "condition_bounds",
    "condition_bounds_rl",
    "config_bank",
    "control",
    "derive_seed",
    "experiment_beam_angle",
    "experiment_beam_range",
    "experiment_scalability",
    "find_clusters",
    "gamma_at",
    "grid_axis",
    "heatmap_marginals",
    "init_world",
    "limit_angle",
    "mean_ci",
    "run_sweep",
    "run_trial",
    "sense",
    "sense_all",
    "split_total",
    "step_pose",
    "step_poses",
    "step_world",
    "to_physical",
    "total_cost",
    "validate_condition_by_simulation",
    "wrap_angle",
    "write_trajectory",
]
