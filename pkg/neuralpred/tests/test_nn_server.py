import socket
import threading

import numpy as np
import pytest
import torch

from neuralpred import wire
from neuralpred.errors import ProtocolViolation
from neuralpred.model import NetworkConfig, build_generator
from neuralpred.server import PredictionHandler, _resize_nearest, serve


def one_hot_planes(rng, side):
    classes = rng.integers(0, 3, (side, side))
    planes = np.zeros((3, side, side), dtype=np.uint8)
    for k in range(3):
        planes[k][classes == k] = 255
    return planes


@pytest.fixture(scope="module")
def handler():
    torch.manual_seed(0)
    generator = build_generator(NetworkConfig(side=16, base_channels=4, patch_size=8))
    return PredictionHandler(generator, 16)


@pytest.fixture
def endpoint(handler):
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


class TestResize:
    def test_identity(self):
        x = np.arange(16.0).reshape(4, 4)
        assert _resize_nearest(x, 4) is x

    def test_upsample_preserves_values(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        up = _resize_nearest(x, 4)
        assert up.shape == (4, 4)
        assert set(np.unique(up)) == {1.0, 2.0, 3.0, 4.0}

    def test_downsample_shape(self):
        x = np.arange(64.0).reshape(8, 8)
        assert _resize_nearest(x, 3).shape == (3, 3)


class TestHandler:
    def test_response_contract(self, handler):
        rng = np.random.default_rng(0)
        planes = one_hot_planes(rng, 16)
        request = {
            "side": 16,
            "resolution": 1.0,
            "robot_cell": (0, 0),
            "free": planes[0],
            "uncertain": planes[1],
            "obstacle": planes[2],
        }
        probs = handler(request)
        assert probs.shape == (16, 16)
        assert probs.min() >= 0.0 and probs.max() <= 1.0
        # observed cells are passed through as certain
        assert np.all(probs[planes[0] == 255] == 0.0)
        assert np.all(probs[planes[2] == 255] == 1.0)

    def test_commitment_band(self, handler):
        rng = np.random.default_rng(1)
        planes = np.zeros((3, 16, 16), dtype=np.uint8)
        planes[1, :, :] = 255  # everything uncertain
        request = {
            "side": 16,
            "resolution": 1.0,
            "robot_cell": (0, 0),
            "free": planes[0],
            "uncertain": planes[1],
            "obstacle": planes[2],
        }
        probs = handler(request)
        committed = (probs != 0.5)
        assert np.all((probs[committed] <= handler.commit_low) | (probs[committed] >= handler.commit_high))

    def test_side_mismatch_resampled(self, handler):
        rng = np.random.default_rng(2)
        planes = one_hot_planes(rng, 32)
        request = {
            "side": 32,
            "resolution": 1.0,
            "robot_cell": (0, 0),
            "free": planes[0],
            "uncertain": planes[1],
            "obstacle": planes[2],
        }
        assert handler(request).shape == (32, 32)


class TestServer:
    def test_round_trip(self, endpoint):
        rng = np.random.default_rng(3)
        planes = one_hot_planes(rng, 16)
        with socket.create_connection(endpoint, timeout=5.0) as sock:
            sock.sendall(wire.encode_request(16, 1.0, 3, 4, planes.tobytes()))
            probs, error = wire.read_response(sock)
        assert error is None
        assert probs.shape == (16, 16)
        assert np.isfinite(probs).all()

    def test_bad_magic_gets_error_frame(self, endpoint):
        with socket.create_connection(endpoint, timeout=5.0) as sock:
            sock.sendall(b"ZZZZ" + bytes(100))
            probs, error = wire.read_response(sock)
        assert probs is None
        assert "magic" in error

    def test_truncated_frame_gets_error_frame(self, endpoint):
        rng = np.random.default_rng(4)
        planes = one_hot_planes(rng, 16)
        payload = wire.encode_request(16, 1.0, 0, 0, planes.tobytes())
        with socket.create_connection(endpoint, timeout=5.0) as sock:
            sock.sendall(payload[:50])
            sock.shutdown(socket.SHUT_WR)
            probs, error = wire.read_response(sock)
        assert probs is None
        assert error


class TestWireEncoding:
    def test_request_header_layout(self):
        raw = wire.encode_request(8, 0.5, 2, 6, bytes(3 * 64))
        assert raw[:4] == b"SXP1"
        assert raw[4] == 0x01
        assert len(raw) == 4 + 1 + 16 + 192

    def test_short_payload_rejected(self):
        with pytest.raises(ValueError):
            wire.encode_request(8, 0.5, 0, 0, bytes(10))

    def test_closed_socket_raises(self):
        a, b = socket.socketpair()
        a.close()
        with b:
            with pytest.raises(ProtocolViolation):
                wire.read_request(b)
