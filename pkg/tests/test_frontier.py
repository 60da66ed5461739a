import numpy as np
import pytest

from oracles import brute_force_frontier
from predexplore.errors import GridMismatch
from predexplore.frontier import cluster_frontiers, extract_frontier_cells
from predexplore.grids import FREE, OBSTACLE, UNCERTAIN, TrinaryGrid


def grids(pred_values, obs_values):
    return (
        TrinaryGrid(np.array(pred_values, dtype=np.uint8)),
        TrinaryGrid(np.array(obs_values, dtype=np.uint8)),
    )


class TestExtract:
    def test_fully_observed_map_has_no_frontier(self):
        pred = TrinaryGrid.filled(6, 6, FREE)
        obs = TrinaryGrid.filled(6, 6, FREE)
        assert extract_frontier_cells(pred, obs) == set()

    def test_half_plane_boundary(self):
        pred = TrinaryGrid.filled(8, 8, FREE)
        obs_cells = np.full((8, 8), UNCERTAIN, dtype=np.uint8)
        obs_cells[:, :4] = FREE
        obs = TrinaryGrid(obs_cells)
        expected = {(r, 4) for r in range(8)}
        assert extract_frontier_cells(pred, obs) == expected

    def test_all_obstacle_prediction(self):
        pred = TrinaryGrid.filled(6, 6, OBSTACLE)
        obs_cells = np.full((6, 6), UNCERTAIN, dtype=np.uint8)
        obs_cells[2, 2] = FREE
        assert extract_frontier_cells(pred, TrinaryGrid(obs_cells)) == set()

    def test_no_uncertain_observed_means_no_frontier(self):
        rng = np.random.default_rng(1)
        pred = TrinaryGrid(rng.integers(0, 3, (10, 10)).astype(np.uint8))
        obs = TrinaryGrid((rng.integers(0, 2, (10, 10)) * 2).astype(np.uint8))
        assert extract_frontier_cells(pred, obs) == set()

    def test_matches_brute_force_on_random_pairs(self):
        rng = np.random.default_rng(77)
        for _ in range(50):
            pred_cells = rng.integers(0, 3, (16, 16)).astype(np.uint8)
            obs_cells = rng.integers(0, 3, (16, 16)).astype(np.uint8)
            got = extract_frontier_cells(TrinaryGrid(pred_cells), TrinaryGrid(obs_cells))
            assert got == brute_force_frontier(pred_cells, obs_cells)

    def test_shape_mismatch(self):
        with pytest.raises(GridMismatch):
            extract_frontier_cells(TrinaryGrid.filled(4, 4, FREE), TrinaryGrid.filled(5, 5, FREE))


class TestCluster:
    def test_empty(self):
        assert cluster_frontiers(set()) == []

    def test_diagonal_cells_form_one_cluster(self):
        clusters = cluster_frontiers({(0, 0), (1, 1)}, min_cluster_size=1)
        assert len(clusters) == 1
        assert clusters[0].area == 2

    def test_min_size_filter_and_centroid(self):
        cells = {(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (5, 5)}
        clusters = cluster_frontiers(cells, min_cluster_size=2, resolution=1.0)
        assert len(clusters) == 1
        cluster = clusters[0]
        assert cluster.area == 5
        mean_row = np.mean([0, 1, 2, 2, 2])
        mean_col = np.mean([0, 0, 0, 1, 2])
        assert cluster.centroid == pytest.approx((mean_col + 0.5, mean_row + 0.5))

    def test_partition_property(self):
        rng = np.random.default_rng(5)
        cells = {(int(r), int(c)) for r, c in rng.integers(0, 20, (60, 2))}
        clusters = cluster_frontiers(cells, min_cluster_size=1)
        seen = set()
        for cluster in clusters:
            assert not (cluster.cells & seen)
            seen |= cluster.cells
        assert seen == cells

    def test_deterministic_ordering(self):
        cells = {(0, 0), (0, 1), (5, 5), (5, 6), (9, 0), (9, 1), (9, 2)}
        a = cluster_frontiers(cells, min_cluster_size=1)
        b = cluster_frontiers(set(cells), min_cluster_size=1)
        assert [c.centroid for c in a] == [c.centroid for c in b]
        assert a[0].area == 3  # largest first
