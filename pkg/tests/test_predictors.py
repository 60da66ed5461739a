import numpy as np
import pytest

from predexplore.grids import FREE, OBSTACLE, UNCERTAIN, TrinaryGrid, encode_channels
from predexplore.predictors import (
    DILATE_PROB,
    DilatePredictor,
    NullPredictor,
    OraclePredictor,
    PredictRequest,
    make_predictor,
    predict_dilate,
    predict_null,
    predict_oracle,
    serialize_request,
)


def request_from(cells, robot_cell=(0, 0), resolution=1.0):
    grid = TrinaryGrid(np.array(cells, dtype=np.uint8), resolution)
    return PredictRequest(
        window=encode_channels(grid), resolution=resolution, robot_cell=robot_cell
    )


def uniform_request(side, value, robot_cell=(0, 0)):
    return request_from(np.full((side, side), value, dtype=np.uint8), robot_cell)


class TestRequest:
    def test_rejects_small_window(self):
        with pytest.raises(ValueError):
            uniform_request(4, FREE)

    def test_rejects_robot_outside(self):
        with pytest.raises(ValueError):
            uniform_request(8, FREE, robot_cell=(8, 0))


class TestNull:
    def test_lift_values(self):
        cells = np.full((8, 8), UNCERTAIN, dtype=np.uint8)
        cells[0, 0] = FREE
        cells[7, 7] = OBSTACLE
        prob = predict_null(request_from(cells)).prob.cells
        assert prob[0, 0] == 0.0
        assert prob[7, 7] == 1.0
        assert prob[3, 3] == 0.5

    def test_never_extrapolates(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            cells = rng.integers(0, 3, (12, 12)).astype(np.uint8)
            prob = predict_null(request_from(cells)).prob.cells
            assert np.array_equal(prob == 0.5, cells == UNCERTAIN)


class TestOracle:
    def test_returns_truth_lift(self):
        rng = np.random.default_rng(12)
        truth = TrinaryGrid(rng.integers(0, 3, (8, 8)).astype(np.uint8))
        req = uniform_request(8, UNCERTAIN)
        prob = predict_oracle(req, truth).prob
        assert np.array_equal(prob.cells, truth.lift().cells)

    def test_class_requires_truth(self):
        with pytest.raises(ValueError):
            OraclePredictor().predict(uniform_request(8, UNCERTAIN))


class TestDilate:
    def test_radius_bounds_extrapolation(self):
        cells = np.full((16, 16), UNCERTAIN, dtype=np.uint8)
        cells[8, 8] = FREE
        prob = predict_dilate(request_from(cells), radius=2).prob.cells
        extrapolated = np.argwhere(prob == DILATE_PROB)
        assert 1 <= len(extrapolated) <= 24  # the (2r+1)^2 - 1 chebyshev ball
        for r, c in extrapolated:
            assert max(abs(r - 8), abs(c - 8)) <= 2

    def test_obstacle_ring_blocks_line_of_sight(self):
        cells = np.full((16, 16), UNCERTAIN, dtype=np.uint8)
        cells[8, 8] = FREE
        # wall ring one cell out; nothing beyond it should be extrapolated
        cells[7:10, 7] = OBSTACLE
        cells[7:10, 9] = OBSTACLE
        cells[7, 7:10] = OBSTACLE
        cells[9, 7:10] = OBSTACLE
        prob = predict_dilate(request_from(cells), radius=3).prob.cells
        assert not (prob == DILATE_PROB).any()

    def test_observed_cells_keep_lift(self):
        rng = np.random.default_rng(13)
        cells = rng.integers(0, 3, (12, 12)).astype(np.uint8)
        prob = predict_dilate(request_from(cells), radius=3).prob.cells
        assert np.all(prob[cells == FREE] == 0.0)
        assert np.all(prob[cells == OBSTACLE] == 1.0)

    def test_radius_zero_is_null(self):
        rng = np.random.default_rng(14)
        cells = rng.integers(0, 3, (10, 10)).astype(np.uint8)
        req = request_from(cells)
        assert np.array_equal(
            predict_dilate(req, radius=0).prob.cells, predict_null(req).prob.cells
        )

    def test_negative_radius(self):
        with pytest.raises(ValueError):
            predict_dilate(uniform_request(8, FREE), radius=-1)


class TestSerialize:
    def test_byte_stable(self):
        rng = np.random.default_rng(15)
        cells = rng.integers(0, 3, (8, 8)).astype(np.uint8)
        req = request_from(cells, robot_cell=(3, 5))
        assert serialize_request(req) == serialize_request(req)

    def test_layout(self):
        req = uniform_request(8, UNCERTAIN, robot_cell=(2, 6))
        raw = serialize_request(req)
        assert raw[:4] == b"SXP1"
        assert raw[4] == 0x01
        assert len(raw) == 4 + 1 + 16 + 3 * 64


class TestFactory:
    def test_names(self):
        assert isinstance(make_predictor("null"), NullPredictor)
        assert isinstance(make_predictor("oracle"), OraclePredictor)
        dilate = make_predictor("dilate", radius=5)
        assert isinstance(dilate, DilatePredictor)
        assert dilate.radius == 5

    def test_unknown(self):
        with pytest.raises(ValueError):
            make_predictor("psychic")

    def test_remote_needs_endpoint(self):
        with pytest.raises(ValueError):
            make_predictor("remote")
