"""Exploration loop orchestration, dataset collection and bookkeeping.

Per tick, every robot senses, predicts its local window and fuses the
prediction into its running predicted map (direct observations override
the predictor); the robots' maps are fused into a total predicted map,
frontiers are extracted and clustered on it, goals are assigned by
linear sum assignment, and each robot advances one fixed step along its
planned path. The loop is sequential and fully deterministic for a
fixed config and seed.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .assign import select_goals
from .errors import ConfigError, NoPath
from .frontier import cluster_frontiers, extract_frontier_cells
from .grids import (
    FREE,
    OBSTACLE,
    UNCERTAIN,
    ProbabilityGrid,
    TrinaryGrid,
    encode_channels,
    threshold,
)
from .metrics import accuracy, coverage
from .pgmio import load_map, save_snapshot, write_pgm
from .planner import plan_path, traversable_mask
from .predictors import PredictRequest, make_predictor
from .sim import (
    LidarConfig,
    RobotState,
    advance_with_collision,
    extract_window,
    integrate_observation,
    paste_window,
    raycast,
)
from .worldgen import random_free_cell

# ticks a robot may sit still on the same goal before its cluster is
# written off as unreachable
STALL_LIMIT = 3

CSV_HEADER = "t,robot_id,x,y,coverage,accuracy,frontier_count,goal_x,goal_y"


@dataclass(frozen=True)
class TickRecord:
    t: int
    robot_id: int
    x: float
    y: float
    coverage: float
    accuracy: float
    frontier_count: int
    goal: tuple | None

    def csv_row(self) -> str:
        goal_x = f"{self.goal[0]:.6f}" if self.goal else ""
        goal_y = f"{self.goal[1]:.6f}" if self.goal else ""
        return (
            f"{self.t},{self.robot_id},{self.x:.6f},{self.y:.6f},"
            f"{self.coverage:.9f},{self.accuracy:.9f},{self.frontier_count},"
            f"{goal_x},{goal_y}"
        )


@dataclass
class ScenarioConfig:
    world: str | None = None  # PGM path; may be omitted when a grid is passed in
    robots: list = field(default_factory=list)  # [[x, y], ...] world coords
    robot_count: int = 1  # used when robots is empty: random free starts
    step_length: float = 2.0
    sensor_range: float = 8.0
    window_scale: float = 1.0
    ray_count: int = 120
    seed: int | None = None
    max_steps: int = 5000
    predictor: str = "null"
    predictor_options: dict = field(default_factory=dict)
    predictor_side: int | None = None  # None: native window side
    tau_free: float = 0.35
    tau_obs: float = 0.65
    min_cluster_size: int = 4
    area_weight: float = 0.0
    inflate: int = 1

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        config = cls(**raw)
        if config.seed is None:
            raise ConfigError("seed is mandatory")
        if config.step_length <= 0 or config.sensor_range <= 0:
            raise ConfigError("step_length and sensor_range must be positive")
        if config.max_steps < 1:
            raise ConfigError("max_steps must be >= 1")
        return config

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class ExplorationResult:
    records: list
    complete: bool
    ticks: int  # ticks executed (T at termination)
    observed: TrinaryGrid  # merged observation map
    predicted: ProbabilityGrid  # fused total predicted map
    predicted_trinary: TrinaryGrid

    def final_coverage(self) -> float:
        return self.records[-1].coverage if self.records else 0.0

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        lines.extend(record.csv_row() for record in self.records)
        return "\n".join(lines) + "\n"


def _initial_robots(config: ScenarioConfig, world: TrinaryGrid) -> list:
    rng = np.random.default_rng(config.seed)
    poses = [tuple(p) for p in config.robots]
    if not poses:
        for _ in range(config.robot_count):
            row, col = random_free_cell(world, rng)
            poses.append(world.world_of(row, col))
    robots = []
    for i, pose in enumerate(poses):
        row, col = world.cell_of(pose[0], pose[1])
        if not world.in_bounds(row, col) or world.cells[row, col] != FREE:
            raise ConfigError(f"robot {i} start {pose} is not on a free world cell")
        robots.append(
            RobotState(
                id=i,
                pose=pose,
                step_length=config.step_length,
                sensor_range=config.sensor_range,
                window_scale=config.window_scale,
            )
        )
    return robots


def _candidate_grid(pred_trinary: TrinaryGrid) -> TrinaryGrid:
    """Predicted map used for frontier candidacy.

    Residual uncertain cells (the predictor committed to neither class)
    stay eligible as goals: only a predicted obstacle disqualifies a
    cell. With the null predictor this reduces frontier search to the
    classic observed-free/unknown boundary.
    """
    cells = np.array(pred_trinary.cells)
    cells[cells == UNCERTAIN] = FREE
    return pred_trinary.with_cells(cells)


def run_exploration(config: ScenarioConfig, world: TrinaryGrid | None = None, predictor=None) -> ExplorationResult:
    """Run one exploration scenario to completion (or max_steps)."""
    if world is None:
        if not config.world:
            raise ConfigError("config.world (map path) required when no grid is passed")
        world = load_map(config.world)
    if config.seed is None:
        raise ConfigError("seed is mandatory")
    robots = _initial_robots(config, world)
    own_predictor = predictor is None
    if own_predictor:
        predictor = make_predictor(config.predictor, **config.predictor_options)

    lidar = LidarConfig(ray_count=config.ray_count, range=config.sensor_range)
    sigma_m = config.window_scale * 2.0 * config.sensor_range
    native_side = robots[0].window_side_cells(world.resolution)
    target_side = config.predictor_side or max(8, native_side)

    shape = world.cells.shape
    obs_maps = [TrinaryGrid.filled(*shape, UNCERTAIN, world.resolution, world.origin) for _ in robots]
    merged = TrinaryGrid.filled(*shape, UNCERTAIN, world.resolution, world.origin)
    pred_grids = [
        ProbabilityGrid.uniform(*shape, 0.5, world.resolution, world.origin) for _ in robots
    ]
    excluded: set = set()
    pending_arrivals: list = []  # (pose, cluster_cells)
    stall = {robot.id: 0 for robot in robots}
    # cells of the cluster each robot is currently committed to; without
    # commitment the distance-band cost makes fresh assignments oscillate
    # between two clusters as the robot nears one of them
    committed = {robot.id: frozenset() for robot in robots}

    records: list = []
    complete = False
    ticks = 0

    try:
        for t in range(config.max_steps):
            ticks = t
            # 1. sense
            for i, robot in enumerate(robots):
                observations = raycast(world, robot.pose, lidar)
                obs_maps[i] = integrate_observation(obs_maps[i], observations)
                merged = integrate_observation(merged, observations)

            # frontier cells a goal visit proved unobservable stop being goals
            for pose, cluster_cells in pending_arrivals:
                for row, col in cluster_cells:
                    if merged.cells[row, col] != UNCERTAIN:
                        continue
                    cx, cy = merged.world_of(row, col)
                    if math.hypot(cx - pose[0], cy - pose[1]) <= config.sensor_range:
                        excluded.add((row, col))
            pending_arrivals = []

            # 2. predict and fuse per robot
            for i, robot in enumerate(robots):
                window = extract_window(obs_maps[i], robot, target_side)
                req = PredictRequest(
                    window=encode_channels(window.grid),
                    resolution=window.grid.resolution,
                    robot_cell=(window.robot_cell[1], window.robot_cell[0]),
                )
                truth_window = extract_window(world, robot, target_side).grid
                response = predictor.predict(req, truth_window=truth_window)
                evidence = paste_window(window, response.prob.cells, world)
                pred_grids[i] = _fuse(pred_grids[i], evidence)
                pred_grids[i] = _override_observed(pred_grids[i], obs_maps[i])

            # 3. total predicted map (single robot: the robot's own map, bit-exact)
            total = pred_grids[0]
            for grid in pred_grids[1:]:
                total = _fuse(total, grid)

            # 4. threshold, frontiers, assignment
            pred_trinary = threshold(total, config.tau_free, config.tau_obs)
            cells = extract_frontier_cells(_candidate_grid(pred_trinary), merged)
            cells -= excluded
            clusters = cluster_frontiers(
                cells, config.min_cluster_size, world.resolution, world.origin
            )
            assignment = select_goals(robots, clusters, sigma_m, config.area_weight)

            cov = coverage(merged, world)
            acc = accuracy(pred_trinary, world)
            for robot in robots:
                records.append(
                    TickRecord(
                        t=t,
                        robot_id=robot.id,
                        x=robot.pose[0],
                        y=robot.pose[1],
                        coverage=cov,
                        accuracy=acc,
                        frontier_count=len(clusters),
                        goal=assignment.goals.get(robot.id),
                    )
                )
            if assignment.complete:
                complete = True
                ticks = t
                break

            # 5. plan and move
            cluster_by_centroid = {cl.centroid: cl for cl in clusters}
            mask = traversable_mask(pred_trinary, merged, config.inflate)
            for i, robot in enumerate(robots):
                goal = assignment.goals[robot.id]
                cluster = cluster_by_centroid.get(goal)
                surviving = next(
                    (cl for cl in clusters if cl.cells & committed[robot.id]), None
                )
                if surviving is not None:
                    cluster = surviving
                    goal = surviving.centroid
                committed[robot.id] = cluster.cells if cluster is not None else frozenset()
                start = world.cell_of(robot.pose[0], robot.pose[1])
                robot_mask = mask
                if not mask[start]:
                    robot_mask = mask.copy()
                    robot_mask[start] = True
                # navigate to the cluster itself, not its centroid: for ring-
                # shaped frontiers the centroid sits inside explored space
                target = _representative_cell(cluster, goal, world)
                try:
                    plan = plan_path(robot_mask, start, target)
                except NoPath:
                    if cluster is not None:
                        excluded.update(cluster.cells)
                    continue
                path = [world.world_of(r, c) for r, c in plan.path]
                moved = advance_with_collision(path, robots[i], world)
                if math.hypot(moved.pose[0] - robot.pose[0], moved.pose[1] - robot.pose[1]) < 1e-9:
                    stall[robot.id] += 1
                    if stall[robot.id] >= STALL_LIMIT and cluster is not None:
                        excluded.update(cluster.cells)
                        stall[robot.id] = 0
                else:
                    stall[robot.id] = 0
                robots[i] = moved
                if cluster is not None and world.cell_of(*moved.pose) == plan.goal:
                    pending_arrivals.append((moved.pose, cluster.cells))
        else:
            ticks = config.max_steps
    finally:
        if own_predictor:
            predictor.close()

    total = pred_grids[0]
    for grid in pred_grids[1:]:
        total = _fuse(total, grid)
    return ExplorationResult(
        records=records,
        complete=complete,
        ticks=ticks,
        observed=merged,
        predicted=total,
        predicted_trinary=threshold(total, config.tau_free, config.tau_obs),
    )


def _representative_cell(cluster, goal, world: TrinaryGrid) -> tuple:
    """Frontier cell of the assigned cluster closest to its centroid."""
    if cluster is None:
        return world.cell_of(goal[0], goal[1])
    return min(
        cluster.cells,
        key=lambda rc: (
            math.hypot(*(a - b for a, b in zip(world.world_of(*rc), goal))),
            rc,
        ),
    )


def _fuse(a: ProbabilityGrid, b: ProbabilityGrid) -> ProbabilityGrid:
    from .grids import fuse_bayes

    return fuse_bayes(a, b)


def _override_observed(pred: ProbabilityGrid, observed: TrinaryGrid) -> ProbabilityGrid:
    cells = np.array(pred.cells)
    cells[observed.cells == FREE] = 0.0
    cells[observed.cells == OBSTACLE] = 1.0
    return pred.with_cells(cells)


def final_l1_error(result: ExplorationResult, world: TrinaryGrid) -> float:
    """Mean absolute difference between truth lift and fused predicted map."""
    return float(np.mean(np.abs(world.lift().cells - result.predicted.cells)))


def collect_dataset(
    corpus_dir,
    samples: int,
    seed: int,
    out_dir,
    sensor_range: float = 8.0,
    window_scale: float = 1.0,
    ray_count: int = 120,
    target_side: int | None = None,
    max_scans: int = 6,
) -> str:
    """Emit (observation window, truth window) training pairs.

    Each sample runs a short randomized partial exploration on a corpus
    map, then crops the robot-centered window from both the observation
    map and the ground truth. Pairs are written as
    ``NNNNNN.obs.pgm`` (three one-hot planes stacked vertically) and
    ``NNNNNN.gt.pgm`` (trinary class pixels), plus ``manifest.json``.
    Deterministic per seed.
    """
    map_paths = sorted(
        os.path.join(corpus_dir, name)
        for name in os.listdir(corpus_dir)
        if name.endswith(".pgm")
    )
    if samples > 0 and not map_paths:
        raise ConfigError(f"no .pgm maps in {corpus_dir}")
    worlds = [load_map(p) for p in map_paths]
    rng = np.random.default_rng(seed)
    os.makedirs(out_dir, exist_ok=True)

    entries = []
    side = None
    for i in range(samples):
        idx = int(rng.integers(0, len(worlds)))
        world = worlds[idx]
        lidar = LidarConfig(ray_count=ray_count, range=sensor_range)
        obs = TrinaryGrid.filled(
            world.height, world.width, UNCERTAIN, world.resolution, world.origin
        )
        row, col = random_free_cell(world, rng)
        pose = world.world_of(row, col)
        scans = int(rng.integers(1, max_scans + 1))
        for _ in range(scans):
            obs = integrate_observation(obs, raycast(world, pose, lidar))
            seen_free = np.argwhere(obs.cells == FREE)
            row, col = seen_free[int(rng.integers(0, len(seen_free)))]
            pose = world.world_of(int(row), int(col))

        robot = RobotState(
            id=0,
            pose=pose,
            step_length=1.0,
            sensor_range=sensor_range,
            window_scale=window_scale,
        )
        native = robot.window_side_cells(world.resolution)
        use_side = target_side or max(8, native)
        window = extract_window(obs, robot, use_side)
        truth = extract_window(world, robot, use_side)
        side = use_side

        stack = encode_channels(window.grid)
        planes = np.vstack([stack.free, stack.uncertain, stack.obstacle])
        write_pgm(os.path.join(out_dir, f"{i:06d}.obs.pgm"), planes)
        save_snapshot(truth.grid, os.path.join(out_dir, f"{i:06d}.gt.pgm"))
        entries.append(
            {
                "id": f"{i:06d}",
                "map": os.path.basename(map_paths[idx]),
                "robot_cell": [int(window.robot_cell[1]), int(window.robot_cell[0])],
                "resolution": window.grid.resolution,
            }
        )

    manifest = {
        "samples": samples,
        "side": side,
        "window_scale": window_scale,
        "sensor_range": sensor_range,
        "entries": entries,
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out_dir
