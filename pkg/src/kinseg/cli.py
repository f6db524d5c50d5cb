"""Command-line interface: trials, sweeps, experiments, condition reports.

Exit codes: 0 success, 2 configuration error, 3 simulation/runtime error.
Every command writes its delimited outputs into --out, renders figures next
to them unless --no-plot is given, and records everything in a manifest.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analysis import condition_bounds_rl, heatmap_marginals
from .config import (
    ConfigError,
    load_trial_config,
    parse_params,
    trial_config_to_dict,
)
from .controller import PARAM_FIELDS
from .engine import (
    SimulationError,
    TrialConfig,
    init_kind_label,
    run_trial,
    write_trajectory,
)
from .search import (
    SweepConfig,
    config_bank,
    experiment_beam_angle,
    experiment_beam_range,
    experiment_scalability,
    run_sweep,
)


def _fmt(value: float) -> str:
    return repr(float(value))


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from exc


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _master_seed(args) -> int:
    return args.seed if args.seed is not None else 0


def _write_manifest(out: Path, command: str, seed, config_payload, outputs: list[Path]) -> Path:
    manifest = {
        "command": command,
        "version": __version__,
        "master_seed": seed,
        "output_dir": str(out.resolve()),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": config_payload,
        "outputs": sorted(str(p.resolve()) for p in outputs),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def _write_experiment_csv(path: Path, points) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["setting", "mean_cost", "ci_low", "ci_high", "n_trials"])
        for p in points:
            writer.writerow([_fmt(p.setting), _fmt(p.mean_cost), _fmt(p.ci_low), _fmt(p.ci_high), p.n_trials])


def _cmd_trial(args) -> int:
    cfg = load_trial_config(args.config) if args.config else TrialConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.params is not None:
        cfg = replace(cfg, params=parse_params(args.params))
    if args.duration is not None:
        cfg = replace(cfg, duration=args.duration)

    result = run_trial(cfg, record_trajectory=args.trajectories is not None)
    out = _out_dir(args)
    outputs = []

    costs_path = out / "costs.csv"
    with open(costs_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial_id", "seed", "init_kind", "c_total", "gamma_final"])
        writer.writerow([0, cfg.seed, init_kind_label(cfg.init), _fmt(result.c_total), _fmt(result.gamma[-1])])
    outputs.append(costs_path)

    gamma_path = out / "gamma_series.csv"
    with open(gamma_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial_id"] + [f"g{t}" for t in range(len(result.gamma))])
        writer.writerow([0] + [_fmt(g) for g in result.gamma])
    outputs.append(gamma_path)

    if args.trajectories is not None:
        traj_dir = Path(args.trajectories)
        traj_dir.mkdir(parents=True, exist_ok=True)
        traj_path = traj_dir / f"trajectory_seed{cfg.seed}.csv"
        write_trajectory(result, traj_path)
        outputs.append(traj_path)

    if not args.no_plot:
        from . import report

        fig_path = out / "gamma.png"
        report.save_gamma_plot(result.gamma, fig_path, title=f"trial seed {cfg.seed}")
        outputs.append(fig_path)

    outputs.append(_write_manifest(out, "trial", cfg.seed, trial_config_to_dict(cfg), outputs))
    print(f"trial seed={cfg.seed} c_total={result.c_total:.6f} gamma_final={result.gamma[-1]:.6f}")
    return 0


def _cmd_sweep(args) -> int:
    classes = tuple(_parse_int_list(args.classes, "--classes"))
    bank_sizes = _parse_int_list(args.bank, "--bank")
    if len(bank_sizes) != 3 or any(n < 0 for n in bank_sizes):
        raise ConfigError("--bank: expected three non-negative counts uniform,clusters,lines")
    master_seed = _master_seed(args)
    bank = config_bank(
        master_seed,
        *bank_sizes,
        classes=classes,
        side=args.side,
        duration=args.duration,
    )
    out = _out_dir(args)
    checkpoint = out / "sweep_checkpoint.csv"
    if checkpoint.exists() and not args.resume:
        raise ConfigError(
            f"checkpoint {checkpoint} already exists; pass --resume to continue or use a fresh --out"
        )
    sweep = SweepConfig(
        bank=tuple(bank),
        axis_points=args.axis_points,
        workers=args.workers,
        master_seed=master_seed,
        checkpoint=checkpoint,
    )
    result = run_sweep(sweep)

    outputs = [checkpoint]
    results_path = out / "sweep_results.csv"
    with open(results_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(PARAM_FIELDS) + ["mean_cost"])
        for params, cost in result.ranked():
            writer.writerow([_fmt(v) for v in params] + [_fmt(cost)])
    outputs.append(results_path)

    if not args.no_plot:
        from . import report

        fig_path = out / "sweep_costs.png"
        report.save_cost_histogram(result.mean_cost, fig_path)
        outputs.append(fig_path)

    payload = {
        "axis_points": args.axis_points,
        "bank": args.bank,
        "bank_version": result.bank_version,
        "classes": list(classes),
        "side": args.side,
        "duration": args.duration,
        "workers": args.workers,
    }
    outputs.append(_write_manifest(out, "sweep", master_seed, payload, outputs))
    best = ",".join(f"{v:g}" for v in result.best_params.values)
    print(f"sweep evaluated {sweep.n_cells} cells; best params [{best}] mean_cost={result.best_cost:.6f}")
    return 0


def _finish_experiment(args, name: str, points, xlabel: str, payload: dict) -> int:
    out = _out_dir(args)
    outputs = []
    csv_path = out / f"{name}.csv"
    _write_experiment_csv(csv_path, points)
    outputs.append(csv_path)
    if not args.no_plot:
        from . import report

        fig_path = out / f"{name}.png"
        report.save_experiment_plot(points, fig_path, xlabel=xlabel, title=name.replace("_", " "))
        outputs.append(fig_path)
    outputs.append(_write_manifest(out, f"experiment {name}", _master_seed(args), payload, outputs))
    for p in points:
        print(
            f"{name} setting={p.setting:g} mean_cost={p.mean_cost:.6f} "
            f"ci=[{p.ci_low:.6f}, {p.ci_high:.6f}] n={p.n_trials}"
        )
    return 0


def _cmd_experiment_scalability(args) -> int:
    points = experiment_scalability(
        _parse_int_list(args.class_counts, "--class-counts"),
        args.trials,
        mode=args.mode.replace("-", "_"),
        per_class=args.per_class,
        total=args.total,
        master_seed=_master_seed(args),
        workers=args.workers,
        side=args.side,
        duration=args.duration,
    )
    payload = {
        "mode": args.mode,
        "class_counts": args.class_counts,
        "trials": args.trials,
        "per_class": args.per_class,
        "total": args.total,
        "duration": args.duration,
    }
    return _finish_experiment(args, "scalability", points, "number of classes", payload)


def _cmd_experiment_beam_angle(args) -> int:
    points = experiment_beam_angle(
        _parse_float_list(args.betas, "--betas"),
        args.trials,
        classes=tuple(_parse_int_list(args.classes, "--classes")),
        master_seed=_master_seed(args),
        workers=args.workers,
        side=args.side,
        duration=args.duration,
    )
    payload = {"betas_deg": args.betas, "trials": args.trials, "classes": args.classes, "duration": args.duration}
    return _finish_experiment(args, "beam_angle", points, "half beam angle [deg]", payload)


def _cmd_experiment_beam_range(args) -> int:
    points = experiment_beam_range(
        _parse_float_list(args.fractions, "--fractions"),
        args.trials,
        beta_deg=args.beta,
        classes=tuple(_parse_int_list(args.classes, "--classes")),
        master_seed=_master_seed(args),
        workers=args.workers,
        side=args.side,
        duration=args.duration,
    )
    payload = {
        "fractions": args.fractions,
        "beta_deg": args.beta,
        "trials": args.trials,
        "classes": args.classes,
        "duration": args.duration,
    }
    return _finish_experiment(args, "beam_range", points, "range fraction of maximum", payload)


def _cmd_conditions(args) -> int:
    try:
        bounds = condition_bounds_rl(args.r, args.l)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    strictest = bounds.strictest
    for name, value in bounds.as_dict().items():
        marker = "  <- strictest" if name == strictest else ""
        print(f"{name} bound (max v_max*delta_t): {value:.9g} m{marker}")
    if args.out is not None:
        out = _out_dir(args)
        outputs = []
        csv_path = out / "conditions.csv"
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["condition", "bound_m", "strictest"])
            for name, value in bounds.as_dict().items():
                writer.writerow([name, _fmt(value), int(name == strictest)])
        outputs.append(csv_path)
        if not args.no_plot:
            import numpy as np

            from . import report

            fig_path = out / "conditions.png"
            report.save_condition_plot(args.r, np.linspace(0.05, 0.5, 64), fig_path)
            outputs.append(fig_path)
        payload = {"r": args.r, "l": args.l, "bounds": bounds.as_dict(), "strictest": strictest}
        outputs.append(_write_manifest(out, "conditions", _master_seed(args), payload, outputs))
    return 0


def _cmd_heatmap(args) -> int:
    results_path = Path(args.results)
    try:
        with open(results_path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            rows = [
                (tuple(float(row[name]) for name in PARAM_FIELDS), float(row["mean_cost"]))
                for row in reader
            ]
    except OSError as exc:
        raise ConfigError(f"cannot read results {results_path}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"results {results_path} is not a sweep results CSV: {exc}") from exc
    if not rows:
        raise ConfigError(f"results {results_path} holds no rows")

    tables = heatmap_marginals(rows)
    out = _out_dir(args)
    outputs = []
    for (a, b), table in sorted(tables.items()):
        path = out / f"heatmap_{PARAM_FIELDS[a]}_{PARAM_FIELDS[b]}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + [_fmt(v) for v in table.col_values])
            for i, row_value in enumerate(table.row_values):
                writer.writerow([_fmt(row_value)] + [_fmt(v) for v in table.mean_cost[i]])
        outputs.append(path)
    if not args.no_plot:
        from . import report

        fig_path = out / "heatmaps.png"
        report.save_heatmap_grid(tables, fig_path)
        outputs.append(fig_path)
    outputs.append(_write_manifest(out, "heatmap", _master_seed(args), {"results": str(results_path)}, outputs))
    print(f"wrote {len(tables)} pair tables to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    common.add_argument("--out", default="out", help="output directory (default ./out)")
    common.add_argument("--workers", type=int, default=1, help="parallel workers (default 1)")
    common.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    parser = argparse.ArgumentParser(
        prog="kinseg",
        description="Deterministic swarm-segregation simulator and analysis toolkit",
    )
    parser.add_argument("--version", action="version", version=f"kinseg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    trial = sub.add_parser("trial", parents=[common], help="run one seeded trial")
    trial.add_argument("--config", help="JSON trial config file")
    trial.add_argument("--params", help="six comma-separated wheel speeds overriding the controller")
    trial.add_argument("--duration", type=float, help="trial duration in seconds")
    trial.add_argument("--trajectories", help="directory for the per-tick trajectory log")
    trial.set_defaults(handler=_cmd_trial)

    sweep = sub.add_parser("sweep", parents=[common], help="grid search over the 6 wheel speeds")
    sweep.add_argument("--axis-points", type=int, default=7, help="lattice values per axis (default 7)")
    sweep.add_argument("--bank", default="18,10,10", help="bank sizes uniform,clusters,lines (default 18,10,10)")
    sweep.add_argument("--classes", default="10,10,10", help="robots per class (default 10,10,10)")
    sweep.add_argument("--side", type=float, default=5.0, help="placement square side in m (default 5)")
    sweep.add_argument("--duration", type=float, default=100.0, help="seconds per trial (default 100)")
    sweep.add_argument("--resume", action="store_true", help="continue from the checkpoint in --out")
    sweep.set_defaults(handler=_cmd_sweep)

    experiment = sub.add_parser("experiment", help="run an experiment suite")
    exp_sub = experiment.add_subparsers(dest="experiment", required=True)

    scal = exp_sub.add_parser("scalability", parents=[common], help="cost versus number of classes")
    scal.add_argument("--mode", choices=["fixed-per-class", "fixed-total"], default="fixed-per-class")
    scal.add_argument("--class-counts", default="2,5,10,15", help="comma-separated class counts")
    scal.add_argument("--trials", type=int, default=10, help="trials per point (default 10)")
    scal.add_argument("--per-class", type=int, default=10, help="robots per class in fixed-per-class mode")
    scal.add_argument("--total", type=int, default=100, help="total robots in fixed-total mode")
    scal.add_argument("--side", type=float, default=5.0)
    scal.add_argument("--duration", type=float, default=100.0)
    scal.set_defaults(handler=_cmd_experiment_scalability)

    angle = exp_sub.add_parser("beam-angle", parents=[common], help="cost versus beam half-angle")
    angle.add_argument("--betas", default="1,15,60", help="half beam angles in degrees")
    angle.add_argument("--trials", type=int, default=20, help="trials per angle (default 20)")
    angle.add_argument("--classes", default="10,10,10,10", help="robots per class (default 10,10,10,10)")
    angle.add_argument("--side", type=float, default=5.0)
    angle.add_argument("--duration", type=float, default=100.0)
    angle.set_defaults(handler=_cmd_experiment_beam_angle)

    rng = exp_sub.add_parser("beam-range", parents=[common], help="cost versus beam range fraction")
    rng.add_argument("--fractions", default="0,0.07,0.35,1.0", help="range fractions of the 7.07 m maximum")
    rng.add_argument("--beta", type=float, default=15.0, help="half beam angle in degrees (default 15)")
    rng.add_argument("--trials", type=int, default=20, help="trials per fraction (default 20)")
    rng.add_argument("--classes", default="10,10,10,10", help="robots per class (default 10,10,10,10)")
    rng.add_argument("--side", type=float, default=5.0)
    rng.add_argument("--duration", type=float, default=100.0)
    rng.set_defaults(handler=_cmd_experiment_beam_range)

    conditions = sub.add_parser("conditions", parents=[common], help="print the three step-size bounds")
    conditions.add_argument("--r", type=float, required=True, help="body radius in m")
    conditions.add_argument("--l", type=float, required=True, help="interwheel distance in m")
    # prints to stdout by default; writes CSV + figure only when --out is given
    conditions.set_defaults(handler=_cmd_conditions, out=None)

    heatmap = sub.add_parser("heatmap", parents=[common], help="pairwise marginals of a sweep results CSV")
    heatmap.add_argument("--results", required=True, help="sweep_results.csv from a sweep run")
    heatmap.set_defaults(handler=_cmd_heatmap)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
