"""Frontier extraction on predicted maps and connected-component clustering.

A frontier cell is predicted free, not yet directly observed, and
8-adjacent to an observed free cell: goals always lie just beyond the
sensed region, in space the predictor believes traversable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import GridMismatch
from .grids import FREE, UNCERTAIN, TrinaryGrid

_EIGHT_CONNECTED = np.ones((3, 3), dtype=int)

DEFAULT_MIN_CLUSTER_SIZE = 4


@dataclass(frozen=True)
class FrontierCluster:
    """8-connected component of frontier cells."""

    cells: frozenset  # of (row, col)
    centroid: tuple[float, float]  # world coords, mean of member cell centers
    area: int  # cell count

    def __post_init__(self):
        object.__setattr__(self, "cells", frozenset(self.cells))


def extract_frontier_cells(pred: TrinaryGrid, observed: TrinaryGrid) -> set:
    """Cells that are predicted-free, observed-uncertain and touch
    (8-adjacent) an observed-free cell. Returns a set of (row, col)."""
    if pred.cells.shape != observed.cells.shape:
        raise GridMismatch(f"pred {pred.cells.shape} vs observed {observed.cells.shape}")
    observed_free = observed.cells == FREE
    near_free = ndimage.binary_dilation(observed_free, structure=_EIGHT_CONNECTED)
    mask = (pred.cells == FREE) & (observed.cells == UNCERTAIN) & near_free
    return {(int(r), int(c)) for r, c in np.argwhere(mask)}


def cluster_frontiers(cells, min_cluster_size=DEFAULT_MIN_CLUSTER_SIZE, resolution=1.0, origin=(0.0, 0.0)):
    """Group frontier cells into 8-connected clusters.

    Clusters below min_cluster_size are discarded. Centroids are world
    coordinates (mean of member cell centers). Output is sorted by area
    descending, ties by centroid (row, col) ascending.
    """
    if not cells:
        return []
    rows = [r for r, _ in cells]
    cols = [c for _, c in cells]
    r0, c0 = min(rows), min(cols)
    mask = np.zeros((max(rows) - r0 + 1, max(cols) - c0 + 1), dtype=bool)
    for r, c in cells:
        mask[r - r0, c - c0] = True
    labels, count = ndimage.label(mask, structure=_EIGHT_CONNECTED)

    clusters = []
    for lab in range(1, count + 1):
        member = np.argwhere(labels == lab)
        if len(member) < min_cluster_size:
            continue
        member_cells = frozenset((int(r) + r0, int(c) + c0) for r, c in member)
        mean_row = float(np.mean([r for r, _ in member_cells]))
        mean_col = float(np.mean([c for _, c in member_cells]))
        centroid = (
            origin[0] + (mean_col + 0.5) * resolution,
            origin[1] + (mean_row + 0.5) * resolution,
        )
        clusters.append(
            FrontierCluster(cells=member_cells, centroid=centroid, area=len(member_cells))
        )
    clusters.sort(key=lambda cl: (-cl.area, _centroid_cell(cl, resolution, origin)))
    return clusters


def _centroid_cell(cluster, resolution, origin):
    # (row, col) of the centroid in grid coordinates, for deterministic ties
    row = (cluster.centroid[1] - origin[1]) / resolution - 0.5
    col = (cluster.centroid[0] - origin[0]) / resolution - 0.5
    return (row, col)
