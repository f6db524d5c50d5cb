"""Cluster detection and the time-weighted segregation cost."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

if TYPE_CHECKING:
    from .engine import WorldState

# Slack added to the tangency distance 2r when deciding adjacency.
DEFAULT_EPSILON = 0.05


@dataclass(frozen=True)
class ClusterReport:
    """Connected components of same-class robots under the adjacency relation
    ``center distance <= 2 * body_radius + epsilon``."""

    class_ids: tuple[int, ...]
    sizes: tuple[tuple[int, ...], ...]  # cluster sizes per class, descending
    largest: tuple[int, ...]
    totals: tuple[int, ...]


def find_clusters(world: "WorldState", body_radius: float, epsilon: float = DEFAULT_EPSILON) -> ClusterReport:
    """Per-class cluster sizes of a world snapshot."""
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    positions = np.asarray(world.poses, dtype=float)[:, :2]
    classes = np.asarray(world.class_ids)
    threshold = 2.0 * body_radius + epsilon

    labels: list[int] = []
    sizes: list[tuple[int, ...]] = []
    largest: list[int] = []
    totals: list[int] = []
    for label in np.unique(classes):
        members = positions[classes == label]
        dx = members[:, 0][:, None] - members[:, 0][None, :]
        dy = members[:, 1][:, None] - members[:, 1][None, :]
        adjacency = np.hypot(dx, dy) <= threshold
        n_comp, component = connected_components(csr_matrix(adjacency), directed=False)
        counts = np.bincount(component, minlength=n_comp)
        by_size = tuple(sorted((int(c) for c in counts), reverse=True))
        labels.append(int(label))
        sizes.append(by_size)
        largest.append(by_size[0])
        totals.append(len(members))
    return ClusterReport(tuple(labels), tuple(sizes), tuple(largest), tuple(totals))


def gamma_at(world: "WorldState", body_radius: float, epsilon: float = DEFAULT_EPSILON) -> float:
    """Mean negative largest-cluster fraction across classes; in [-1, 0)."""
    report = find_clusters(world, body_radius, epsilon)
    if not report.class_ids:
        raise ValueError("gamma is undefined for an empty world")
    terms = [-(c / total) for c, total in zip(report.largest, report.totals)]
    return sum(terms) / len(terms)


def total_cost(gamma_series: Sequence[float] | np.ndarray) -> float:
    """Time-weighted sum ``sum_t t * gamma(t)`` over whole-second samples."""
    series = list(gamma_series)
    if not series:
        raise ValueError("gamma series must hold at least one sample")
    return float(sum(t * g for t, g in enumerate(series)))


@dataclass(frozen=True)
class CostSeries:
    """A per-second gamma series together with its total cost."""

    gamma: tuple[float, ...]
    c_total: float

    @classmethod
    def from_samples(cls, gamma: Iterable[float]) -> "CostSeries":
        series = tuple(float(g) for g in gamma)
        return cls(series, total_cost(series))
