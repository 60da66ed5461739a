"""Pluggable local map predictors.

Every predictor maps an observed window (three-channel one-hot stack) to
a per-cell obstacle probability grid of the same side. Built-ins:

* null — the identity lift; no extrapolation. Exploration with it
  behaves like classic frontier search.
* oracle — returns the ground-truth window; the upper bound on what any
  predictor can contribute.
* dilate — dependency-free heuristic that marks unknown cells near
  line-of-sight-visible free space as probably free.
* remote — forwards the window to an out-of-process model over the
  frame protocol (see protocol.py).
"""

from __future__ import annotations

import socket
from dataclasses import dataclass

import numpy as np

from . import protocol
from .errors import ConnectionFailed, GridMismatch
from .grids import FREE, OBSTACLE, UNCERTAIN, ChannelStack, ProbabilityGrid, TrinaryGrid, decode_channels

DEFAULT_WINDOW_SIDE = 256
DILATE_PROB = 0.25  # below tau_free, so extrapolated cells classify as free


@dataclass(frozen=True)
class PredictRequest:
    window: ChannelStack
    resolution: float
    robot_cell: tuple[int, int]  # (col, row) inside the window

    def __post_init__(self):
        if self.window.height != self.window.width:
            raise ValueError("window must be square")
        if self.window.height < 8:
            raise ValueError("window side must be >= 8")
        col, row = self.robot_cell
        if not (0 <= col < self.window.width and 0 <= row < self.window.height):
            raise ValueError(f"robot_cell {self.robot_cell} outside the window")

    @property
    def side(self) -> int:
        return self.window.height


@dataclass(frozen=True)
class PredictResponse:
    prob: ProbabilityGrid


def predict_null(req: PredictRequest) -> PredictResponse:
    """Identity lift of the observation: free 0, obstacle 1, uncertain 0.5."""
    window = decode_channels(req.window, resolution=req.resolution)
    return PredictResponse(prob=window.lift())


def predict_oracle(req: PredictRequest, truth_window: TrinaryGrid) -> PredictResponse:
    """Ground-truth lift of the matching true-map window (perfect predictor)."""
    if truth_window.cells.shape != (req.side, req.side):
        raise GridMismatch(f"truth window {truth_window.cells.shape} vs request side {req.side}")
    return PredictResponse(prob=truth_window.lift())


def _bresenham_between(r0, c0, r1, c1):
    """Cells strictly between the two endpoints on the Bresenham line."""
    cells = []
    dr = abs(r1 - r0)
    dc = abs(c1 - c0)
    sr = 1 if r1 > r0 else -1
    sc = 1 if c1 > c0 else -1
    err = dc - dr
    r, c = r0, c0
    while True:
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr
        if (r, c) == (r1, c1):
            return cells
        cells.append((r, c))


def predict_dilate(req: PredictRequest, radius: int = 3) -> PredictResponse:
    """Heuristic free-space extrapolation.

    Each uncertain cell within Chebyshev distance ``radius`` of an
    observed free cell, with no observed obstacle on the straight
    cell-line between them, is marked probably-free (p=0.25). Observed
    cells keep their lifted value.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    window = decode_channels(req.window, resolution=req.resolution)
    probs = np.array(window.lift().cells)
    if radius == 0:
        return PredictResponse(prob=ProbabilityGrid(probs, req.resolution, window.origin))
    cells = window.cells
    obstacle = cells == OBSTACLE
    free = cells == FREE
    side = req.side
    for r, c in np.argwhere(cells == UNCERTAIN):
        hit = False
        for fr in range(max(0, r - radius), min(side, r + radius + 1)):
            for fc in range(max(0, c - radius), min(side, c + radius + 1)):
                if not free[fr, fc]:
                    continue
                if any(obstacle[br, bc] for br, bc in _bresenham_between(r, c, fr, fc)):
                    continue
                hit = True
                break
            if hit:
                break
        if hit:
            probs[r, c] = DILATE_PROB
    return PredictResponse(prob=ProbabilityGrid(probs, req.resolution, window.origin))


def serialize_request(req: PredictRequest) -> bytes:
    """Byte-stable wire encoding of a request (channel-planar payload)."""
    planes = (
        req.window.free.tobytes() + req.window.uncertain.tobytes() + req.window.obstacle.tobytes()
    )
    col, row = req.robot_cell
    return protocol.encode_request(req.side, req.resolution, col, row, planes)


def predict_remote(req: PredictRequest, endpoint: str, timeout: float = 10.0) -> PredictResponse:
    """One-shot remote prediction over a fresh TCP connection."""
    with RemotePredictor(endpoint, timeout=timeout) as remote:
        return remote.predict(req)


class NullPredictor:
    name = "null"

    def predict(self, req, truth_window=None):
        return predict_null(req)

    def close(self):
        pass


class OraclePredictor:
    name = "oracle"

    def predict(self, req, truth_window=None):
        if truth_window is None:
            raise ValueError("oracle predictor needs the ground-truth window")
        return predict_oracle(req, truth_window)

    def close(self):
        pass


class DilatePredictor:
    name = "dilate"

    def __init__(self, radius: int = 3):
        self.radius = radius

    def predict(self, req, truth_window=None):
        return predict_dilate(req, self.radius)

    def close(self):
        pass


class RemotePredictor:
    """Protocol client holding one connection; one request in flight.

    Reconnects once on a broken connection before giving up.
    """

    name = "remote"

    def __init__(self, endpoint: str, timeout: float = 10.0):
        host, _, port = endpoint.rpartition(":")
        if not host or not port.isdigit():
            raise ValueError(f"endpoint must be host:port, got {endpoint!r}")
        self.host = host
        self.port = int(port)
        self.timeout = timeout
        self._sock = None

    def _connect(self):
        try:
            sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
        except OSError as exc:
            raise ConnectionFailed(f"{self.host}:{self.port}: {exc}") from exc
        sock.settimeout(self.timeout)
        return sock

    def predict(self, req, truth_window=None):
        payload = serialize_request(req)
        for attempt in (0, 1):
            if self._sock is None:
                self._sock = self._connect()
            try:
                self._sock.sendall(payload)
                probs = protocol.read_response(self._sock, req.side)
                break
            except (OSError, ConnectionFailed):
                self.close()
                if attempt == 1:
                    raise
        prob = ProbabilityGrid(probs, req.resolution)
        return PredictResponse(prob=prob)

    def close(self):
        if self._sock is not None:
            try:
                self._sock.close()
            finally:
                self._sock = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def make_predictor(name: str, **kwargs):
    """Factory keyed by predictor name ('null', 'oracle', 'dilate', 'remote')."""
    if name == "null":
        return NullPredictor()
    if name == "oracle":
        return OraclePredictor()
    if name == "dilate":
        return DilatePredictor(radius=int(kwargs.get("radius", 3)))
    if name == "remote":
        endpoint = kwargs.get("endpoint")
        if not endpoint:
            raise ValueError("remote predictor needs an endpoint")
        return RemotePredictor(endpoint, timeout=float(kwargs.get("timeout", 10.0)))
    raise ValueError(f"unknown predictor {name!r}")
