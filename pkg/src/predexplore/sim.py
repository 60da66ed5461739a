"""Ground-truth sensing simulation: lidar raycasting, observation maps,
local window extraction and fixed-step motion along planned paths.

The robot is a holonomic point with a continuous world pose. Lidar is a
360-degree fan of rays walked cell-by-cell with an Amanatides-Woo style
grid traversal; a ray reports every free cell it crosses and terminates
on (and reports) the first obstacle cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CellOutOfBounds, EmptyPath, PoseInObstacle, PoseOutOfBounds
from .grids import FREE, OBSTACLE, UNCERTAIN, ProbabilityGrid, TrinaryGrid

# boundary-crossing tie tolerance: step diagonally when the ray hits a
# cell corner (exact 45-degree rays from cell centers do this)
_CORNER_TIE = 1e-9


@dataclass(frozen=True)
class RobotState:
    """Robot identity, pose and sensing/motion parameters."""

    id: int
    pose: tuple[float, float]  # world meters
    step_length: float  # distance moved per tick (L)
    sensor_range: float  # lidar radius (r), meters
    window_scale: float = 1.0  # window side = scale * 2 * sensor_range

    def __post_init__(self):
        if self.step_length <= 0 or self.sensor_range <= 0 or self.window_scale <= 0:
            raise ValueError("step_length, sensor_range and window_scale must be positive")
        object.__setattr__(self, "pose", (float(self.pose[0]), float(self.pose[1])))

    def moved_to(self, pose) -> "RobotState":
        return replace(self, pose=(float(pose[0]), float(pose[1])))

    def window_side_cells(self, resolution: float) -> int:
        """Side of the observation window in cells (sigma = scale * 2r)."""
        return max(1, int(round(self.window_scale * 2.0 * self.sensor_range / resolution)))


@dataclass(frozen=True)
class LidarConfig:
    ray_count: int = 360
    range: float = 5.0  # meters

    def __post_init__(self):
        if self.ray_count < 4:
            raise ValueError("ray_count must be >= 4")
        if self.range <= 0:
            raise ValueError("range must be positive")


@dataclass(frozen=True)
class ObservationWindow:
    """Square crop of an observation map centered on the robot cell."""

    grid: TrinaryGrid
    center: tuple[int, int]  # robot (row, col) in the source map
    world_offset: tuple[int, int]  # (row, col) of the window origin in the source map
    native_side: int  # crop side before resampling
    robot_cell: tuple[int, int]  # robot (row, col) inside the (resampled) window


def _traverse_ray(px, py, dx, dy, range_cells):
    """Yield (row, col, entry_t) for cells crossed by the ray, in order.

    Coordinates are in cell units (cells are unit squares). The starting
    cell is yielded with entry 0; traversal stops once the entry distance
    exceeds range_cells.
    """
    col = int(math.floor(px))
    row = int(math.floor(py))
    yield row, col, 0.0

    if dx > 0:
        step_col, tmax_x, tdelta_x = 1, (col + 1 - px) / dx, 1.0 / dx
    elif dx < 0:
        step_col, tmax_x, tdelta_x = -1, (col - px) / dx, -1.0 / dx
    else:
        step_col, tmax_x, tdelta_x = 0, math.inf, math.inf
    if dy > 0:
        step_row, tmax_y, tdelta_y = 1, (row + 1 - py) / dy, 1.0 / dy
    elif dy < 0:
        step_row, tmax_y, tdelta_y = -1, (row - py) / dy, -1.0 / dy
    else:
        step_row, tmax_y, tdelta_y = 0, math.inf, math.inf

    while True:
        if abs(tmax_x - tmax_y) <= _CORNER_TIE:
            # corner hit: cross into the diagonal cell directly
            t = tmax_x
            col += step_col
            row += step_row
            tmax_x += tdelta_x
            tmax_y += tdelta_y
        elif tmax_x < tmax_y:
            t = tmax_x
            col += step_col
            tmax_x += tdelta_x
        else:
            t = tmax_y
            row += step_row
            tmax_y += tdelta_y
        if t > range_cells:
            return
        yield row, col, t


def raycast(world: TrinaryGrid, pose, config: LidarConfig):
    """Simulate one lidar scan. Returns a dict {(row, col): FREE|OBSTACLE}.

    Rays are cast at ray_count equally spaced headings. Free cells crossed
    within range are reported free; the first obstacle cell on a ray is
    reported and terminates it. Ground-truth uncertain cells block the ray
    without being reported.
    """
    row0, col0 = world.cell_of(pose[0], pose[1])
    if not world.in_bounds(row0, col0):
        raise PoseOutOfBounds(f"pose {pose} outside the world")
    if world.cells[row0, col0] != FREE:
        raise PoseInObstacle(f"pose {pose} is not on a free cell")

    px = (pose[0] - world.origin[0]) / world.resolution
    py = (pose[1] - world.origin[1]) / world.resolution
    range_cells = config.range / world.resolution
    cells = world.cells
    height, width = cells.shape

    observations = {(row0, col0): FREE}
    for k in range(config.ray_count):
        heading = 2.0 * math.pi * k / config.ray_count
        dx = math.cos(heading)
        dy = math.sin(heading)
        for row, col, t in _traverse_ray(px, py, dx, dy, range_cells):
            if t == 0.0:
                continue  # robot cell already reported
            if not (0 <= row < height and 0 <= col < width):
                break
            cls = cells[row, col]
            if cls == OBSTACLE:
                observations[(row, col)] = OBSTACLE
                break
            if cls == UNCERTAIN:
                break
            observations.setdefault((row, col), FREE)
    return observations


def integrate_observation(obs_map: TrinaryGrid, observations) -> TrinaryGrid:
    """Merge a raycast result into an observation map.

    Observed cells overwrite uncertain ones; an obstacle observation
    overwrites free (direct observation wins); nothing reverts to
    uncertain. Idempotent.
    """
    cells = np.array(obs_map.cells)
    height, width = cells.shape
    for (row, col), cls in observations.items():
        if not (0 <= row < height and 0 <= col < width):
            raise CellOutOfBounds(f"observation at ({row}, {col}) outside {cells.shape}")
        if cls == OBSTACLE:
            cells[row, col] = OBSTACLE
        elif cls == FREE and cells[row, col] == UNCERTAIN:
            cells[row, col] = FREE
    return obs_map.with_cells(cells)


def _nearest_indices(src_side: int, dst_side: int) -> np.ndarray:
    """Nearest-neighbor source index for each destination index."""
    return np.minimum(
        ((np.arange(dst_side) + 0.5) * src_side / dst_side).astype(int), src_side - 1
    )


def extract_window(obs_map: TrinaryGrid, robot: RobotState, target_side: int) -> ObservationWindow:
    """Crop the robot-centered square window and resample to target_side.

    Out-of-bounds cells are filled uncertain. Resampling is nearest
    neighbor so the trinary alphabet is preserved.
    """
    if target_side < 8:
        raise ValueError("target_side must be >= 8")
    row0, col0 = obs_map.cell_of(robot.pose[0], robot.pose[1])
    side = robot.window_side_cells(obs_map.resolution)
    top = row0 - side // 2
    left = col0 - side // 2

    crop = np.full((side, side), UNCERTAIN, dtype=np.uint8)
    src_r0, src_r1 = max(0, top), min(obs_map.height, top + side)
    src_c0, src_c1 = max(0, left), min(obs_map.width, left + side)
    if src_r0 < src_r1 and src_c0 < src_c1:
        crop[src_r0 - top : src_r1 - top, src_c0 - left : src_c1 - left] = obs_map.cells[
            src_r0:src_r1, src_c0:src_c1
        ]

    if side != target_side:
        idx = _nearest_indices(side, target_side)
        crop = crop[np.ix_(idx, idx)]
        scale = target_side / side
        robot_cell = (
            min(target_side - 1, int((row0 - top + 0.5) * scale)),
            min(target_side - 1, int((col0 - left + 0.5) * scale)),
        )
    else:
        robot_cell = (row0 - top, col0 - left)

    window_origin = (
        obs_map.origin[0] + left * obs_map.resolution,
        obs_map.origin[1] + top * obs_map.resolution,
    )
    grid = TrinaryGrid(crop, obs_map.resolution * side / target_side, window_origin)
    return ObservationWindow(
        grid=grid,
        center=(row0, col0),
        world_offset=(top, left),
        native_side=side,
        robot_cell=robot_cell,
    )


def paste_window(window: ObservationWindow, probs: np.ndarray, like: TrinaryGrid) -> ProbabilityGrid:
    """Paste a window-sized probability patch back into map coordinates.

    Returns a probability grid with the geometry of ``like``, holding 0.5
    (the fusion identity) everywhere outside the pasted region. Resampled
    windows are expanded back to the native crop side with
    nearest-neighbor lookup.
    """
    side = window.native_side
    probs = np.asarray(probs, dtype=np.float64)
    if probs.shape[0] != side:
        idx = _nearest_indices(probs.shape[0], side)
        probs = probs[np.ix_(idx, idx)]
    height, width = like.cells.shape
    top, left = window.world_offset
    full = np.full((height, width), 0.5)
    src_r0, src_r1 = max(0, top), min(height, top + side)
    src_c0, src_c1 = max(0, left), min(width, left + side)
    if src_r0 < src_r1 and src_c0 < src_c1:
        full[src_r0:src_r1, src_c0:src_c1] = probs[
            src_r0 - top : src_r1 - top, src_c0 - left : src_c1 - left
        ]
    return ProbabilityGrid(full, like.resolution, like.origin)


def step_along(path, robot: RobotState) -> RobotState:
    """Advance the robot exactly step_length meters of arc length along a
    polyline path (or to the path end if the path is shorter)."""
    if not path:
        raise EmptyPath("cannot step along an empty path")
    remaining = robot.step_length
    pos = np.asarray(robot.pose, dtype=float)
    for waypoint in path:
        target = np.asarray(waypoint, dtype=float)
        seg = target - pos
        seg_len = float(np.hypot(seg[0], seg[1]))
        if seg_len >= remaining and seg_len > 0:
            pos = pos + seg * (remaining / seg_len)
            remaining = 0.0
            break
        pos = target
        remaining -= seg_len
    return robot.moved_to(pos)


def advance_with_collision(path, robot: RobotState, world: TrinaryGrid) -> RobotState:
    """Advance like step_along but stop before crossing a non-free
    ground-truth cell (the robot bumps and holds position).

    Planned paths may run through predicted-but-unobserved space, so the
    simulator must arbitrate against the true map. Walks the polyline in
    0.05-cell increments and keeps the last pose on a free cell.
    """
    if not path:
        raise EmptyPath("cannot advance along an empty path")
    step = 0.05 * world.resolution
    remaining = robot.step_length
    pos = np.asarray(robot.pose, dtype=float)
    last_good = pos.copy()
    for waypoint in path:
        target = np.asarray(waypoint, dtype=float)
        seg = target - pos
        seg_len = float(np.hypot(seg[0], seg[1]))
        if seg_len == 0:
            continue
        travel = min(seg_len, remaining)
        direction = seg / seg_len
        dist = 0.0
        while dist < travel:
            dist = min(dist + step, travel)
            pt = pos + direction * dist
            row, col = world.cell_of(pt[0], pt[1])
            if not world.in_bounds(row, col) or world.cells[row, col] != FREE:
                return robot.moved_to(last_good)
            last_good = pt
        pos = pos + direction * travel
        remaining -= travel
        if remaining <= 0:
            break
    return robot.moved_to(last_good)
