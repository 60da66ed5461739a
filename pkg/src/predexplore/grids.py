"""Core occupancy grid types and conversions.

Grids are row-major numpy arrays indexed ``cells[row, col]``. World
coordinates map to cells through ``resolution`` (meters per cell) and
``origin`` (world position of the outer corner of cell (0, 0)). Cell
classes follow the trinary alphabet: free, uncertain (unobserved) and
obstacle. Probability grids store per-cell obstacle probability, with
0.5 acting as the uninformative prior / fusion identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, InvalidThresholds, NotOneHot

FREE = 0
UNCERTAIN = 1
OBSTACLE = 2

# clamp applied before the log-odds transform so exact 0/1 stay finite
LOGODDS_EPS = 1e-4

DEFAULT_TAU_FREE = 0.35
DEFAULT_TAU_OBS = 0.65


@dataclass(frozen=True)
class TrinaryGrid:
    """Occupancy grid over {FREE, UNCERTAIN, OBSTACLE}."""

    cells: np.ndarray
    resolution: float = 0.05
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.uint8)
        if cells.ndim != 2:
            raise ValueError("cells must be a 2D row-major array")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if cells.size and cells.max() > OBSTACLE:
            raise ValueError("cells must be FREE, UNCERTAIN or OBSTACLE")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @classmethod
    def filled(cls, height, width, value=UNCERTAIN, resolution=0.05, origin=(0.0, 0.0)):
        return cls(np.full((height, width), value, dtype=np.uint8), resolution, origin)

    def with_cells(self, cells: np.ndarray) -> "TrinaryGrid":
        """New grid with the same geometry but different cells."""
        return TrinaryGrid(cells, self.resolution, self.origin)

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """(row, col) of the cell containing world point (x, y)."""
        col = int(np.floor((x - self.origin[0]) / self.resolution))
        row = int(np.floor((y - self.origin[1]) / self.resolution))
        return row, col

    def world_of(self, row: int, col: int) -> tuple[float, float]:
        """World coordinates of the center of cell (row, col)."""
        x = self.origin[0] + (col + 0.5) * self.resolution
        y = self.origin[1] + (row + 0.5) * self.resolution
        return x, y

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    def lift(self) -> "ProbabilityGrid":
        """Trinary -> probability: free 0.0, obstacle 1.0, uncertain 0.5."""
        probs = np.full(self.cells.shape, 0.5)
        probs[self.cells == FREE] = 0.0
        probs[self.cells == OBSTACLE] = 1.0
        return ProbabilityGrid(probs, self.resolution, self.origin)

    def __eq__(self, other):
        if not isinstance(other, TrinaryGrid):
            return NotImplemented
        return (
            self.cells.shape == other.cells.shape
            and np.array_equal(self.cells, other.cells)
            and self.resolution == other.resolution
            and self.origin == other.origin
        )


@dataclass(frozen=True)
class ProbabilityGrid:
    """Per-cell obstacle probability in [0, 1]."""

    cells: np.ndarray
    resolution: float = 0.05
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.float64)
        if cells.ndim != 2:
            raise ValueError("cells must be a 2D row-major array")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if not np.all(np.isfinite(cells)):
            raise ValueError("probabilities must be finite")
        if cells.size and (cells.min() < 0.0 or cells.max() > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @classmethod
    def uniform(cls, height, width, p=0.5, resolution=0.05, origin=(0.0, 0.0)):
        return cls(np.full((height, width), float(p)), resolution, origin)

    def with_cells(self, cells: np.ndarray) -> "ProbabilityGrid":
        return ProbabilityGrid(cells, self.resolution, self.origin)


@dataclass(frozen=True)
class ChannelStack:
    """One-hot three-plane encoding of a trinary grid (values 0/255)."""

    free: np.ndarray
    uncertain: np.ndarray
    obstacle: np.ndarray

    def __post_init__(self):
        for name in ("free", "uncertain", "obstacle"):
            plane = np.asarray(getattr(self, name), dtype=np.uint8)
            plane.flags.writeable = False
            object.__setattr__(self, name, plane)
        if not (self.free.shape == self.uncertain.shape == self.obstacle.shape):
            raise ValueError("channel planes must share one shape")

    @property
    def height(self) -> int:
        return self.free.shape[0]

    @property
    def width(self) -> int:
        return self.free.shape[1]


def _check_geometry(a, b):
    if a.cells.shape != b.cells.shape:
        raise GridMismatch(f"shape {a.cells.shape} vs {b.cells.shape}")
    if abs(a.resolution - b.resolution) > 1e-9:
        raise GridMismatch(f"resolution {a.resolution} vs {b.resolution}")
    if abs(a.origin[0] - b.origin[0]) > 1e-9 or abs(a.origin[1] - b.origin[1]) > 1e-9:
        raise GridMismatch(f"origin {a.origin} vs {b.origin}")


def encode_channels(grid: TrinaryGrid) -> ChannelStack:
    """Encode a trinary grid into three one-hot planes (free/uncertain/obstacle)."""
    free = np.where(grid.cells == FREE, 255, 0).astype(np.uint8)
    uncertain = np.where(grid.cells == UNCERTAIN, 255, 0).astype(np.uint8)
    obstacle = np.where(grid.cells == OBSTACLE, 255, 0).astype(np.uint8)
    return ChannelStack(free, uncertain, obstacle)


def decode_channels(stack: ChannelStack, resolution=0.05, origin=(0.0, 0.0)) -> TrinaryGrid:
    """Exact inverse of encode_channels. Raises NotOneHot on violations."""
    hot = (
        (stack.free == 255).astype(np.uint8)
        + (stack.uncertain == 255).astype(np.uint8)
        + (stack.obstacle == 255).astype(np.uint8)
    )
    if np.any(hot != 1):
        bad = np.argwhere(hot != 1)
        raise NotOneHot(f"{len(bad)} cells violate one-hot, first at {tuple(bad[0])}")
    cells = np.full(stack.free.shape, UNCERTAIN, dtype=np.uint8)
    cells[stack.free == 255] = FREE
    cells[stack.obstacle == 255] = OBSTACLE
    return TrinaryGrid(cells, resolution, origin)


def threshold(prob: ProbabilityGrid, tau_free=DEFAULT_TAU_FREE, tau_obs=DEFAULT_TAU_OBS) -> TrinaryGrid:
    """Partition probabilities: p <= tau_free free, p >= tau_obs obstacle, else uncertain."""
    if not (0.0 <= tau_free < tau_obs <= 1.0):
        raise InvalidThresholds(f"need 0 <= tau_free < tau_obs <= 1, got ({tau_free}, {tau_obs})")
    cells = np.full(prob.cells.shape, UNCERTAIN, dtype=np.uint8)
    cells[prob.cells <= tau_free] = FREE
    cells[prob.cells >= tau_obs] = OBSTACLE
    return TrinaryGrid(cells, prob.resolution, prob.origin)


def fuse_bayes(a: ProbabilityGrid, b: ProbabilityGrid) -> ProbabilityGrid:
    """Log-odds fusion of two probability grids (independent evidence).

    Probabilities are clamped to [eps, 1-eps] before the transform so exact
    0/1 inputs stay finite. Cells where one side is exactly 0.5 pass the
    other side through untouched (0.5 is the identity).
    """
    _check_geometry(a, b)
    pa = np.clip(a.cells, LOGODDS_EPS, 1.0 - LOGODDS_EPS)
    pb = np.clip(b.cells, LOGODDS_EPS, 1.0 - LOGODDS_EPS)
    logodds = np.log(pa / (1.0 - pa)) + np.log(pb / (1.0 - pb))
    fused = 1.0 / (1.0 + np.exp(-logodds))
    fused = np.where(a.cells == 0.5, b.cells, fused)
    fused = np.where(b.cells == 0.5, a.cells, fused)
    return ProbabilityGrid(np.clip(fused, 0.0, 1.0), a.resolution, a.origin)
