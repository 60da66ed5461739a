"""Prediction-guided multi-robot frontier exploration simulator."""

from .assign import Assignment, build_cost_matrix, linear_sum_assignment, select_goals
from .frontier import FrontierCluster, cluster_frontiers, extract_frontier_cells
from .grids import (
    FREE,
    OBSTACLE,
    UNCERTAIN,
    ChannelStack,
    ProbabilityGrid,
    TrinaryGrid,
    decode_channels,
    encode_channels,
    fuse_bayes,
    threshold,
)
from .metrics import ObjectiveWeights, accuracy, coverage, objective, psnr, ssim
from .pgmio import load_map, save_snapshot
from .planner import PlanResult, plan_path, traversable_mask
from .predictors import (
    DilatePredictor,
    NullPredictor,
    OraclePredictor,
    PredictRequest,
    PredictResponse,
    RemotePredictor,
    make_predictor,
    predict_dilate,
    predict_null,
    predict_oracle,
    predict_remote,
)
from .runner import ExplorationResult, ScenarioConfig, TickRecord, collect_dataset, run_exploration
from .sim import (
    LidarConfig,
    ObservationWindow,
    RobotState,
    extract_window,
    integrate_observation,
    paste_window,
    raycast,
    step_along,
)
from .worldgen import generate_world

__version__ = "0.1.0"
