"""Robot-to-frontier goal assignment.

Each robot/cluster pair gets cost |dist(centroid, robot) - sigma|, where
sigma is the observation window side: the cheapest frontier sits right at
the edge of what the robot can predict about, so each step of travel
keeps feeding the predictor new context. An optional area weighting
divides the cost by (1 + w * area) to bias robots toward larger unknown
regions. Goals are chosen by minimum-total-cost linear sum assignment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import EmptyClusters


@dataclass(frozen=True)
class Assignment:
    """Robot-id -> goal (world coords), plus the exploration-complete mark."""

    goals: dict
    complete: bool

    def __post_init__(self):
        if self.complete != (len(self.goals) == 0):
            raise ValueError("complete must hold exactly when no goals exist")


def build_cost_matrix(robots, clusters, sigma, area_weight=0.0) -> np.ndarray:
    """Cost matrix with entry |dist(mu_j, P_i) - sigma| / (1 + w * area_j).

    With area_weight=0 this is the plain distance-band cost.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if area_weight < 0:
        raise ValueError("area_weight must be >= 0")
    if not clusters:
        raise EmptyClusters("no clusters to cost")
    poses = np.array([robot.pose for robot in robots], dtype=float)
    centroids = np.array([cl.centroid for cl in clusters], dtype=float)
    areas = np.array([cl.area for cl in clusters], dtype=float)
    dists = np.linalg.norm(poses[:, None, :] - centroids[None, :, :], axis=2)
    base = np.abs(dists - sigma)
    return base / (1.0 + area_weight * areas)[None, :]


def linear_sum_assignment(costs: np.ndarray):
    """Minimum-total-cost pairing of rows to columns.

    Rectangular matrices assign min(rows, cols) pairs. Returns a list of
    (row, col) pairs sorted lexicographically. Deterministic for a fixed
    matrix.
    """
    costs = np.asarray(costs, dtype=float)
    if costs.size == 0:
        raise ValueError("cost matrix must be nonempty")
    rows, cols = scipy.optimize.linear_sum_assignment(costs)
    return sorted(zip(rows.tolist(), cols.tolist()))


def select_goals(robots, clusters, sigma, area_weight=0.0) -> Assignment:
    """Assign one frontier centroid to each robot.

    Empty cluster list means exploration is complete. With fewer clusters
    than robots, the optimal pairs are assigned first and the leftover
    robots greedily take their individually cheapest cluster (shared
    goals beat idling).
    """
    if not clusters:
        return Assignment(goals={}, complete=True)
    costs = build_cost_matrix(robots, clusters, sigma, area_weight)
    pairs = linear_sum_assignment(costs)
    goals = {robots[i].id: clusters[j].centroid for i, j in pairs}
    assigned_rows = {i for i, _ in pairs}
    for i, robot in enumerate(robots):
        if i not in assigned_rows:
            goals[robot.id] = clusters[int(np.argmin(costs[i]))].centroid
    return Assignment(goals=goals, complete=False)
