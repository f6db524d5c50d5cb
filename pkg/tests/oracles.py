"""Independent reference computations the test suite checks against.

These deliberately avoid the closed forms used by the package: pose
propagation is re-derived by substep integration of the unicycle ODE,
clusters by explicit transitive closure, and the step-size bounds by
high-precision evaluation of their printed formulas.
"""

from __future__ import annotations

import math

import numpy as np


def integrated_pose(pose, speeds, rc, substeps: int) -> tuple[float, float, float]:
    """Substep integration of the unicycle ODE with midpoint sampling.

    The heading is linear in time, so the position reduces to a quadrature
    of cos/sin along the heading profile; midpoint sampling makes the
    discretization error O(1/substeps^2), far below the comparison
    tolerances.
    """
    v_left = rc.v_max * speeds[0]
    v_right = rc.v_max * speeds[1]
    v = 0.5 * (v_left + v_right)
    omega = (v_right - v_left) / rc.interwheel
    h = rc.delta_t / substeps
    k = np.arange(substeps)
    theta_k = pose.theta + omega * h * (k + 0.5)
    x = pose.x + v * h * float(np.sum(np.cos(theta_k)))
    y = pose.y + v * h * float(np.sum(np.sin(theta_k)))
    return x, y, pose.theta + omega * rc.delta_t


def euler_pose(pose, speeds, rc, substeps: int) -> tuple[float, float, float]:
    """Plain left-endpoint Euler integration of the unicycle ODE."""
    v_left = rc.v_max * speeds[0]
    v_right = rc.v_max * speeds[1]
    v = 0.5 * (v_left + v_right)
    omega = (v_right - v_left) / rc.interwheel
    h = rc.delta_t / substeps
    k = np.arange(substeps)
    theta_k = pose.theta + omega * h * k
    x = pose.x + v * h * float(np.sum(np.cos(theta_k)))
    y = pose.y + v * h * float(np.sum(np.sin(theta_k)))
    return x, y, pose.theta + omega * rc.delta_t


def brute_force_clusters(positions, class_ids, body_radius, epsilon):
    """Per-class cluster sizes via transitive closure of the adjacency matrix.

    Returns {class_id: sorted-descending tuple of cluster sizes}.
    """
    positions = np.asarray(positions, dtype=float)
    class_ids = np.asarray(class_ids)
    threshold = 2.0 * body_radius + epsilon
    out = {}
    for label in sorted(set(int(c) for c in class_ids)):
        members = positions[class_ids == label]
        m = len(members)
        dx = members[:, 0][:, None] - members[:, 0][None, :]
        dy = members[:, 1][:, None] - members[:, 1][None, :]
        adjacency = np.hypot(dx, dy) <= threshold
        reach = adjacency.copy()
        np.fill_diagonal(reach, True)
        for k in range(m):
            reach |= np.outer(reach[:, k], reach[k, :])
        seen = set()
        sizes = []
        for i in range(m):
            key = tuple(np.nonzero(reach[i])[0])
            if key not in seen:
                seen.add(key)
                sizes.append(len(key))
        out[label] = tuple(sorted(sizes, reverse=True))
    return out


def bound_formulas_hp(body_radius: float, interwheel: float) -> dict[str, float]:
    """The three printed step-size bound formulas at 50 decimal digits."""
    from mpmath import mp, atan, mpf, sqrt

    old = mp.dps
    mp.dps = 50
    try:
        r = mpf(body_radius)
        l = mpf(interwheel)
        s1 = 3 * l * atan(sqrt(3) * r / l)
        s0 = mpf(6) / 5 * l * atan(10 * sqrt(3) * r / l)
        s2 = 2 * l * atan(2 * sqrt(3) * r / l)
        return {"S0": float(s0), "S1": float(s1), "S2": float(s2)}
    finally:
        mp.dps = old
