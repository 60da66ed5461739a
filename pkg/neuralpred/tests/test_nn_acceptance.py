"""Release gate for the neural predictor package.

Covers protocol conformance under load, training sanity at toy scale,
and end-to-end exploration quality against the simulator's built-in
baseline, driving the simulator only through its command line.
"""

import json
import socket
import threading
import time

import numpy as np
import pytest
import torch

from sim_cli import run_cli
from neuralpred import wire
from neuralpred.dataset import PairDataset
from neuralpred.model import NetworkConfig, build_generator
from neuralpred.server import PredictionHandler, serve
from neuralpred.train import load_checkpoint, train, validation_l1

HELD_OUT_SEEDS = [201, 202, 203, 204, 205]
TOY_CONFIG = NetworkConfig(side=64, base_channels=8, patch_size=8)


@pytest.fixture(scope="module")
def checkpoint(pair_dataset, tmp_path_factory):
    """One toy training run shared by the module; records wall time."""
    out = tmp_path_factory.mktemp("ckpt")
    start = time.monotonic()
    result = train(
        pair_dataset, out, config=TOY_CONFIG, epochs=20, seed=0, log=lambda *a: None
    )
    result["train_seconds"] = time.monotonic() - start
    return result


@pytest.fixture()
def served_model(checkpoint):
    generator, meta = load_checkpoint(checkpoint["checkpoint"])
    handler = PredictionHandler(generator, meta["network"]["side"])
    ready = threading.Event()
    stop = threading.Event()
    holder = {}

    def run():
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            holder["port"] = probe.getsockname()[1]
        serve("127.0.0.1", holder["port"], handler, ready, stop, log=lambda *a: None)

    thread = threading.Thread(target=run, daemon=True)
    thread.start()
    assert ready.wait(5.0)
    yield ("127.0.0.1", holder["port"])
    stop.set()
    thread.join(5.0)


def one_hot_planes(rng, side):
    classes = rng.integers(0, 3, (side, side))
    planes = np.zeros((3, side, side), dtype=np.uint8)
    for k in range(3):
        planes[k][classes == k] = 255
    return planes


def test_protocol_soak_1000_requests(served_model):
    """1000 well-formed requests round-trip with zero protocol violations."""
    rng = np.random.default_rng(0)
    with socket.create_connection(served_model, timeout=10.0) as sock:
        for i in range(1000):
            side = int(rng.choice([8, 16, 24, 32, 64]))
            planes = one_hot_planes(rng, side)
            col = int(rng.integers(0, side))
            row = int(rng.integers(0, side))
            sock.sendall(wire.encode_request(side, 1.0, col, row, planes.tobytes()))
            probs, error = wire.read_response(sock)
            assert error is None, f"request {i}: {error}"
            assert probs.shape == (side, side), f"request {i}"
            assert np.isfinite(probs).all()
            assert probs.min() >= 0.0 and probs.max() <= 1.0


def test_truncated_frame_yields_error_frame(served_model):
    rng = np.random.default_rng(1)
    planes = one_hot_planes(rng, 16)
    payload = wire.encode_request(16, 1.0, 0, 0, planes.tobytes())
    with socket.create_connection(served_model, timeout=10.0) as sock:
        sock.sendall(payload[: len(payload) // 2])
        sock.shutdown(socket.SHUT_WR)
        probs, error = wire.read_response(sock)
    assert probs is None
    assert error


def test_training_loss_decreases(checkpoint):
    """Generator total loss at epoch 5 is below epoch 1 on the 200-sample set."""
    rows = checkpoint["rows"]
    assert rows[4][1] < rows[0][1], f"epoch5 {rows[4][1]} vs epoch1 {rows[0][1]}"


def test_trained_beats_untrained_validation(checkpoint, pair_dataset):
    _, val = PairDataset(pair_dataset).split()
    torch.manual_seed(0)
    untrained = validation_l1(build_generator(TOY_CONFIG), val)
    trained = checkpoint["rows"][-1][3]
    assert trained < untrained, f"trained {trained} vs untrained {untrained}"


def test_toy_training_time_budget(checkpoint):
    assert checkpoint["train_seconds"] <= 600.0


def test_exploration_accuracy_matches_baseline(served_model, tmp_path):
    """Median final classification accuracy with the served model is at least
    the baseline's across 5 held-out worlds, via the simulator CLI."""
    host, port = served_model

    def final_accuracy(seed, predictor_fields):
        world = tmp_path / f"world{seed}.pgm"
        if not world.exists():
            run_cli("genmap", world, "--seed", seed)
        config = dict(
            world=str(world),
            robot_count=1,
            seed=seed,
            ray_count=120,
            min_cluster_size=1,
            inflate=0,
            max_steps=5000,
            **predictor_fields,
        )
        name = predictor_fields["predictor"]
        config_path = tmp_path / f"scenario-{seed}-{name}.json"
        config_path.write_text(json.dumps(config))
        out = tmp_path / f"out-{seed}-{name}"
        run_cli("run", config_path, "--out", out)
        last = (out / "metrics.csv").read_text().splitlines()[-1]
        return float(last.split(",")[5])

    remote_fields = dict(
        predictor="remote",
        predictor_options={"endpoint": f"{host}:{port}"},
        predictor_side=64,
    )
    baseline = [final_accuracy(s, dict(predictor="null")) for s in HELD_OUT_SEEDS]
    remote = [final_accuracy(s, remote_fields) for s in HELD_OUT_SEEDS]
    assert np.median(remote) >= np.median(baseline), f"{remote} vs {baseline}"
