import math

import numpy as np
import pytest

from oracles import dijkstra_cost
from predexplore.errors import GridMismatch, NoPath
from predexplore.grids import FREE, OBSTACLE, UNCERTAIN, TrinaryGrid
from predexplore.planner import plan_path, snap_to_traversable, traversable_mask


def trinary(values):
    return TrinaryGrid(np.array(values, dtype=np.uint8))


class TestTraversableMask:
    def test_all_free(self):
        pred = TrinaryGrid.filled(5, 5, FREE)
        assert traversable_mask(pred, pred, inflate=0).all()

    def test_inflation_ball(self):
        pred_cells = np.full((5, 5), FREE, dtype=np.uint8)
        pred_cells[2, 2] = OBSTACLE
        mask = traversable_mask(trinary(pred_cells), TrinaryGrid.filled(5, 5, UNCERTAIN), inflate=1)
        assert not mask[1:4, 1:4].any()
        assert mask.sum() == 25 - 9

    def test_observed_obstacle_beats_predicted_free(self):
        pred = TrinaryGrid.filled(3, 3, FREE)
        obs_cells = np.full((3, 3), FREE, dtype=np.uint8)
        obs_cells[1, 1] = OBSTACLE
        mask = traversable_mask(pred, trinary(obs_cells), inflate=0)
        assert not mask[1, 1]
        assert mask.sum() == 8

    def test_mismatch(self):
        with pytest.raises(GridMismatch):
            traversable_mask(TrinaryGrid.filled(3, 3, FREE), TrinaryGrid.filled(4, 4, FREE))


class TestPlanPath:
    def test_trivial(self):
        mask = np.ones((5, 5), dtype=bool)
        plan = plan_path(mask, (2, 2), (2, 2))
        assert plan.path == [(2, 2)]
        assert plan.cost == 0.0

    def test_corner_to_corner_octile(self):
        mask = np.ones((10, 10), dtype=bool)
        plan = plan_path(mask, (0, 0), (9, 9))
        assert plan.cost == pytest.approx(9 * math.sqrt(2), abs=1e-9)

    def test_matches_dijkstra_on_random_masks(self):
        rng = np.random.default_rng(31)
        solved = 0
        while solved < 100:
            mask = rng.random((20, 20)) > 0.3
            cells = np.argwhere(mask)
            if len(cells) < 2:
                continue
            start = tuple(cells[int(rng.integers(0, len(cells)))])
            goal = tuple(cells[int(rng.integers(0, len(cells)))])
            expected = dijkstra_cost(mask, start, goal)
            if expected is None:
                with pytest.raises(NoPath):
                    plan_path(mask, start, goal)
                continue
            plan = plan_path(mask, start, goal)
            assert plan.cost == pytest.approx(expected, abs=1e-9)
            solved += 1

    def test_path_stays_on_mask_and_adjacent(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            mask = rng.random((15, 15)) > 0.25
            cells = np.argwhere(mask)
            start = tuple(cells[int(rng.integers(0, len(cells)))])
            goal = tuple(cells[int(rng.integers(0, len(cells)))])
            try:
                plan = plan_path(mask, start, goal)
            except NoPath:
                continue
            for cell in plan.path:
                assert mask[cell]
            for a, b in zip(plan.path, plan.path[1:]):
                assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1

    def test_goal_snapping(self):
        mask = np.ones((7, 7), dtype=bool)
        mask[3:6, 3:6] = False
        plan = plan_path(mask, (0, 0), (4, 4))
        # nearest traversable ring cell around (4,4), ties by (row, col)
        assert plan.goal == snap_to_traversable(mask, (4, 4))
        assert plan.goal == (2, 2)

    def test_untraversable_start_rejected(self):
        mask = np.ones((4, 4), dtype=bool)
        mask[0, 0] = False
        with pytest.raises(ValueError):
            plan_path(mask, (0, 0), (3, 3))


class TestSnap:
    def test_snap_identity(self):
        mask = np.ones((5, 5), dtype=bool)
        assert snap_to_traversable(mask, (1, 4)) == (1, 4)

    def test_snap_minimal_ring(self):
        mask = np.zeros((9, 9), dtype=bool)
        mask[4, 6] = True  # ring radius 2
        mask[8, 8] = True  # farther
        assert snap_to_traversable(mask, (4, 4)) == (4, 6)
