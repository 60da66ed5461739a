"""Prediction server speaking the frame protocol.

Each request carries a square 3-plane observation window; the model has
a fixed input side, so windows of other sides are nearest-neighbor
resized in and the probabilities resized back out. Malformed frames get
an error frame; the server never crashes on client input.
"""

from __future__ import annotations

import socket

import numpy as np
import torch

from . import wire
from .errors import ProtocolViolation


def _resize_nearest(array: np.ndarray, side: int) -> np.ndarray:
    if array.shape[-1] == side:
        return array
    src = array.shape[-1]
    idx = (np.arange(side) * src // side).clip(0, src - 1)
    return array[..., idx, :][..., :, idx]


class PredictionHandler:
    """Turns decoded request payloads into probability grids.

    Outputs pass through a commitment band: cells the model is not
    confident about are emitted as exactly 0.5, which downstream
    Bayesian fusion treats as no evidence. Without the band, a mild
    class bias repeated over many overlapping windows accumulates into
    false certainty.
    """

    def __init__(self, generator, model_side: int, commit_low: float = 0.2, commit_high: float = 0.8):
        if not 0.0 <= commit_low <= commit_high <= 1.0:
            raise ValueError("need 0 <= commit_low <= commit_high <= 1")
        self.generator = generator.eval()
        self.model_side = model_side
        self.commit_low = commit_low
        self.commit_high = commit_high

    def __call__(self, request: dict) -> np.ndarray:
        planes = np.stack(
            [
                (request["free"] == 255).astype(np.float32),
                (request["uncertain"] == 255).astype(np.float32),
                (request["obstacle"] == 255).astype(np.float32),
            ]
        )
        planes = _resize_nearest(planes, self.model_side)
        with torch.no_grad():
            pred = self.generator(torch.from_numpy(planes).unsqueeze(0))
        probs = pred.squeeze(0).squeeze(0).numpy().astype(np.float64)
        probs = _resize_nearest(probs, request["side"])
        probs = np.clip(probs, 0.0, 1.0)
        undecided = (probs > self.commit_low) & (probs < self.commit_high)
        probs[undecided] = 0.5
        # observed cells stay committed regardless of model confidence
        probs[request["free"] == 255] = 0.0
        probs[request["obstacle"] == 255] = 1.0
        return probs


def serve(host: str, port: int, handler, ready=None, stop=None, log=print):
    """Blocking accept loop; one request at a time per connection."""
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as server:
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        server.bind((host, port))
        server.listen(8)
        server.settimeout(0.2)
        if ready is not None:
            ready.set()
        log(f"serving on {host}:{server.getsockname()[1]}")
        while stop is None or not stop.is_set():
            try:
                conn, peer = server.accept()
            except socket.timeout:
                continue
            with conn:
                while True:
                    try:
                        request = wire.read_request(conn)
                    except ProtocolViolation as exc:
                        try:
                            conn.sendall(wire.encode_error(str(exc)))
                        except OSError:
                            pass
                        break
                    try:
                        probs = handler(request)
                        conn.sendall(wire.encode_response(probs))
                    except OSError:
                        break
                    except Exception as exc:  # inference failure -> error frame
                        log(f"handler error from {peer}: {exc}")
                        try:
                            conn.sendall(wire.encode_error(str(exc)))
                        except OSError:
                            break
