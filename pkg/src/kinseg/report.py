"""Static matplotlib renderings of trial, experiment, and sweep outputs.

The CSVs written by the CLI are the authoritative record; every function
here renders a figure file next to them.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import PairTable, condition_bounds_rl
from .controller import PARAM_FIELDS

FIG_DPI = 150


def save_gamma_plot(gamma: Sequence[float], path, title: str = "segregation over time") -> None:
    """Per-second cost samples of one trial."""
    fig, ax = plt.subplots(figsize=(6.0, 3.5))
    ax.plot(np.arange(len(gamma)), gamma, lw=1.5)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("gamma")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def save_experiment_plot(points, path, xlabel: str, title: str, logx: bool = False) -> None:
    """Mean cost with confidence intervals across experiment settings."""
    settings = [p.setting for p in points]
    means = [p.mean_cost for p in points]
    err_low = [p.mean_cost - p.ci_low for p in points]
    err_high = [p.ci_high - p.mean_cost for p in points]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(settings, means, yerr=[err_low, err_high], fmt="o-", capsize=3, lw=1.5)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("mean cost")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def save_heatmap_grid(tables: Mapping[tuple[int, int], PairTable], path) -> None:
    """All pairwise mean-cost tables as one figure (lower cost is darker)."""
    pairs = sorted(tables)
    n_cols = 5
    n_rows = int(np.ceil(len(pairs) / n_cols))
    fig, axes = plt.subplots(n_rows, n_cols, figsize=(3.0 * n_cols, 2.8 * n_rows))
    axes = np.atleast_2d(axes)
    for ax in axes.flat:
        ax.set_visible(False)
    for k, pair in enumerate(pairs):
        table = tables[pair]
        ax = axes.flat[k]
        ax.set_visible(True)
        im = ax.imshow(table.mean_cost, origin="lower", aspect="auto", cmap="viridis_r")
        ax.set_xticks(range(len(table.col_values)))
        ax.set_xticklabels([f"{v:g}" for v in table.col_values], fontsize=7, rotation=45)
        ax.set_yticks(range(len(table.row_values)))
        ax.set_yticklabels([f"{v:g}" for v in table.row_values], fontsize=7)
        ax.set_xlabel(PARAM_FIELDS[pair[1]], fontsize=8)
        ax.set_ylabel(PARAM_FIELDS[pair[0]], fontsize=8)
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def save_cost_histogram(mean_costs: Iterable[float], path, title: str = "sweep mean costs") -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(list(mean_costs), bins=40)
    ax.set_xlabel("mean cost")
    ax.set_ylabel("parameter sets")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def save_condition_plot(
    body_radius: float,
    interwheel_values: Sequence[float],
    path,
) -> None:
    """The three step-size bounds as a function of the interwheel distance."""
    curves: dict[str, list[float]] = {"S0": [], "S1": [], "S2": []}
    for interwheel in interwheel_values:
        bounds = condition_bounds_rl(body_radius, interwheel)
        for name, value in bounds.as_dict().items():
            curves[name].append(value)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name, values in curves.items():
        ax.plot(interwheel_values, values, lw=1.5, label=f"{name} bound")
    ax.set_xlabel("interwheel distance [m]")
    ax.set_ylabel("max admissible v_max * delta_t [m]")
    ax.set_title(f"step-size bounds, body radius {body_radius} m")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)
