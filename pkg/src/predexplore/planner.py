"""A* grid path planning over the combined observed/predicted map."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import GridMismatch, NoPath
from .grids import OBSTACLE, TrinaryGrid

SQRT2 = math.sqrt(2.0)

# 8-connected moves with unit/diagonal costs
_MOVES = [
    (-1, 0, 1.0), (1, 0, 1.0), (0, -1, 1.0), (0, 1, 1.0),
    (-1, -1, SQRT2), (-1, 1, SQRT2), (1, -1, SQRT2), (1, 1, SQRT2),
]


@dataclass(frozen=True)
class PlanResult:
    path: list  # (row, col) cells from start to (snapped) goal inclusive
    cost: float  # path length in cell units
    goal: tuple  # the snapped goal actually reached


def traversable_mask(pred: TrinaryGrid, observed: TrinaryGrid, inflate: int = 1) -> np.ndarray:
    """Boolean grid of cells the planner may use.

    A cell is traversable when neither the observed map nor the predicted
    map marks it as an obstacle; obstacles are then inflated by a
    Chebyshev radius to keep clearance. Observed obstacles always win
    over predicted free space.
    """
    if pred.cells.shape != observed.cells.shape:
        raise GridMismatch(f"pred {pred.cells.shape} vs observed {observed.cells.shape}")
    blocked = (observed.cells == OBSTACLE) | (pred.cells == OBSTACLE)
    if inflate > 0:
        size = 2 * inflate + 1
        blocked = ndimage.binary_dilation(blocked, structure=np.ones((size, size), dtype=bool))
    return ~blocked


def octile(a, b) -> float:
    dr = abs(a[0] - b[0])
    dc = abs(a[1] - b[1])
    return max(dr, dc) + (SQRT2 - 1.0) * min(dr, dc)


def snap_to_traversable(mask: np.ndarray, goal) -> tuple:
    """Nearest traversable cell by Chebyshev ring search, ties by (row, col)."""
    height, width = mask.shape
    gr = min(max(goal[0], 0), height - 1)
    gc = min(max(goal[1], 0), width - 1)
    if mask[gr, gc]:
        return (gr, gc)
    for radius in range(1, max(height, width)):
        candidates = []
        for r in range(gr - radius, gr + radius + 1):
            for c in range(gc - radius, gc + radius + 1):
                if max(abs(r - gr), abs(c - gc)) != radius:
                    continue
                if 0 <= r < height and 0 <= c < width and mask[r, c]:
                    candidates.append((r, c))
        if candidates:
            return min(candidates)
    raise NoPath("no traversable cell anywhere in the mask")


def plan_path(mask: np.ndarray, start, goal) -> PlanResult:
    """Shortest 8-connected path on the mask via A* with octile heuristic.

    An untraversable goal is snapped to the nearest traversable cell
    first. Raises NoPath when the snapped goal is in a different
    connected component than the start.
    """
    start = (int(start[0]), int(start[1]))
    if not mask[start]:
        raise ValueError(f"start {start} is not traversable")
    goal = snap_to_traversable(mask, (int(goal[0]), int(goal[1])))
    if start == goal:
        return PlanResult(path=[start], cost=0.0, goal=goal)

    height, width = mask.shape
    g_score = {start: 0.0}
    came_from = {}
    # (f, h, row, col) keys keep expansion order deterministic
    open_heap = [(octile(start, goal), octile(start, goal), start[0], start[1])]
    closed = set()
    while open_heap:
        _, _, row, col = heapq.heappop(open_heap)
        current = (row, col)
        if current in closed:
            continue
        if current == goal:
            path = [current]
            while current in came_from:
                current = came_from[current]
                path.append(current)
            path.reverse()
            return PlanResult(path=path, cost=g_score[goal], goal=goal)
        closed.add(current)
        base = g_score[current]
        for dr, dc, move_cost in _MOVES:
            nr, nc = row + dr, col + dc
            if not (0 <= nr < height and 0 <= nc < width) or not mask[nr, nc]:
                continue
            tentative = base + move_cost
            neighbor = (nr, nc)
            if tentative < g_score.get(neighbor, math.inf) - 1e-12:
                g_score[neighbor] = tentative
                came_from[neighbor] = current
                h = octile(neighbor, goal)
                heapq.heappush(open_heap, (tentative + h, h, nr, nc))
    raise NoPath(f"goal {goal} unreachable from {start}")
