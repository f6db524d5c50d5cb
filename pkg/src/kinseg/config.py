"""JSON serialization of trial configurations for the CLI."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .controller import ControllerParams
from .engine import ClusterInit, LineInit, TrialConfig, UniformRandomInit
from .kinematics import RobotCharacteristics
from .sensing import SensorConfig, SensorPolicy


class ConfigError(ValueError):
    """A config file or CLI parameter is malformed."""


_POLICIES = {p.value: p for p in SensorPolicy}


def parse_params(text: str) -> ControllerParams:
    """Parse six comma-separated wheel speeds in display order."""
    try:
        values = tuple(float(v) for v in text.split(","))
        return ControllerParams(values)
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from exc


def trial_config_to_dict(cfg: TrialConfig) -> dict:
    init: dict[str, object] = {"kind": "uniform_random", "side": cfg.init.side}
    if isinstance(cfg.init, ClusterInit):
        init = {"kind": "clusters", "side": cfg.init.side, "sigma": cfg.init.sigma}
    elif isinstance(cfg.init, LineInit):
        init = {"kind": "lines", "side": cfg.init.side, "pitch": cfg.init.pitch}
    return {
        "seed": cfg.seed,
        "params": list(cfg.params.values),
        "robot": {
            "body_radius": cfg.robot.body_radius,
            "interwheel": cfg.robot.interwheel,
            "v_max": cfg.robot.v_max,
            "delta_t": cfg.robot.delta_t,
        },
        "sensor": {
            "half_beam_angle_deg": math.degrees(cfg.sensor.half_beam_angle),
            "max_range": cfg.sensor.max_range,
            "policy": cfg.sensor.policy.value,
        },
        "classes": list(cfg.classes),
        "init": init,
        "duration": cfg.duration,
        "metric_epsilon": cfg.metric_epsilon,
    }


def _section(data: dict, name: str, known: tuple[str, ...]) -> dict:
    section = data.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"{name}: expected an object")
    for key in section:
        if key not in known:
            raise ConfigError(f"{name}.{key}: unknown field")
    return section


def _build_init(data: dict):
    init = data.get("init", {"kind": "uniform_random"})
    if not isinstance(init, dict):
        raise ConfigError("init: expected an object")
    kind = init.get("kind", "uniform_random")
    try:
        if kind == "uniform_random":
            return UniformRandomInit(side=init.get("side", 5.0))
        if kind == "clusters":
            return ClusterInit(side=init.get("side", 5.0), sigma=init.get("sigma", 0.5))
        if kind == "lines":
            return LineInit(side=init.get("side", 5.0), pitch=init.get("pitch"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"init: {exc}") from exc
    raise ConfigError(f"init.kind: unknown kind {kind!r}")


def trial_config_from_dict(data: dict) -> TrialConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    known = ("seed", "params", "robot", "sensor", "classes", "init", "duration", "metric_epsilon")
    for key in data:
        if key not in known:
            raise ConfigError(f"{key}: unknown field")

    robot_data = _section(data, "robot", ("body_radius", "interwheel", "v_max", "delta_t"))
    try:
        robot = RobotCharacteristics(
            body_radius=robot_data.get("body_radius", 0.085),
            interwheel=robot_data.get("interwheel", 0.14),
            v_max=robot_data.get("v_max", 0.3),
            delta_t=robot_data.get("delta_t", 0.1),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"robot: {exc}") from exc

    sensor_data = _section(data, "sensor", ("half_beam_angle_deg", "max_range", "policy"))
    policy_name = sensor_data.get("policy", "closest")
    if policy_name not in _POLICIES:
        raise ConfigError(f"sensor.policy: unknown policy {policy_name!r}")
    try:
        sensor = SensorConfig(
            half_beam_angle=math.radians(sensor_data.get("half_beam_angle_deg", 15.0)),
            max_range=sensor_data.get("max_range"),
            policy=_POLICIES[policy_name],
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sensor: {exc}") from exc

    try:
        params = ControllerParams(tuple(data["params"])) if "params" in data else None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"params: {exc}") from exc

    try:
        kwargs = dict(
            seed=data.get("seed", 0),
            robot=robot,
            sensor=sensor,
            classes=tuple(data.get("classes", (10, 10, 10))),
            init=_build_init(data),
            duration=data.get("duration", 100.0),
            metric_epsilon=data.get("metric_epsilon", 0.05),
        )
        if params is not None:
            kwargs["params"] = params
        return TrialConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_trial_config(path: str | Path) -> TrialConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return trial_config_from_dict(data)


def save_trial_config(cfg: TrialConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(trial_config_to_dict(cfg), indent=2) + "\n", encoding="utf-8")
