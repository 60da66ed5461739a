"""Binary framing for the out-of-process predictor protocol.

All frames open with the 4-byte magic ``SXP1`` followed by a type byte;
remaining integers and floats are little-endian. Frame types:

* 0x01 request: side u32, resolution f32, robot_col u32, robot_row u32,
  then 3*side*side payload bytes (free, uncertain, obstacle planes,
  values 0/255).
* 0x02 response: side u32, then side*side f32 obstacle probabilities,
  row-major.
* 0xFF error: length u32, then a UTF-8 message.
"""

from __future__ import annotations

import socket
import struct

import numpy as np

from .errors import ProtocolViolation, RemoteError

MAGIC = b"SXP1"
TYPE_REQUEST = 0x01
TYPE_RESPONSE = 0x02
TYPE_ERROR = 0xFF

_REQUEST_HEADER = struct.Struct("<IfII")


def encode_request(side: int, resolution: float, robot_col: int, robot_row: int, planes: bytes) -> bytes:
    if len(planes) != 3 * side * side:
        raise ValueError(f"payload must be 3*side^2 bytes, got {len(planes)}")
    return (
        MAGIC
        + bytes([TYPE_REQUEST])
        + _REQUEST_HEADER.pack(side, resolution, robot_col, robot_row)
        + planes
    )


def encode_response(probs: np.ndarray) -> bytes:
    probs = np.asarray(probs, dtype="<f4")
    side = probs.shape[0]
    return MAGIC + bytes([TYPE_RESPONSE]) + struct.pack("<I", side) + probs.tobytes()


def encode_error(message: str) -> bytes:
    raw = message.encode("utf-8")
    return MAGIC + bytes([TYPE_ERROR]) + struct.pack("<I", len(raw)) + raw


def recv_exact(sock, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ProtocolViolation(f"connection closed mid-frame ({len(buf)}/{n} bytes)")
        buf += chunk
    return buf


def read_frame(sock):
    """Read one frame; returns (type, payload dict)."""
    magic = recv_exact(sock, 4)
    if magic != MAGIC:
        raise ProtocolViolation(f"bad magic {magic!r}")
    ftype = recv_exact(sock, 1)[0]
    if ftype == TYPE_REQUEST:
        header = recv_exact(sock, _REQUEST_HEADER.size)
        side, resolution, robot_col, robot_row = _REQUEST_HEADER.unpack(header)
        if side < 8:
            raise ProtocolViolation(f"request side {side} < 8")
        planes = recv_exact(sock, 3 * side * side)
        return ftype, {
            "side": side,
            "resolution": resolution,
            "robot_col": robot_col,
            "robot_row": robot_row,
            "planes": planes,
        }
    if ftype == TYPE_RESPONSE:
        (side,) = struct.unpack("<I", recv_exact(sock, 4))
        raw = recv_exact(sock, 4 * side * side)
        probs = np.frombuffer(raw, dtype="<f4").reshape(side, side)
        return ftype, {"side": side, "probs": probs}
    if ftype == TYPE_ERROR:
        (length,) = struct.unpack("<I", recv_exact(sock, 4))
        message = recv_exact(sock, length).decode("utf-8", errors="replace")
        return ftype, {"message": message}
    raise ProtocolViolation(f"unknown frame type 0x{ftype:02x}")


def read_response(sock, expect_side: int) -> np.ndarray:
    """Read one frame and require a response of the given side."""
    ftype, payload = read_frame(sock)
    if ftype == TYPE_ERROR:
        raise RemoteError(payload["message"])
    if ftype != TYPE_RESPONSE:
        raise ProtocolViolation(f"expected response frame, got type 0x{ftype:02x}")
    if payload["side"] != expect_side:
        raise ProtocolViolation(f"response side {payload['side']} != request side {expect_side}")
    probs = payload["probs"].astype(np.float64)
    if not np.all(np.isfinite(probs)) or probs.min() < 0.0 or probs.max() > 1.0:
        raise ProtocolViolation("response probabilities outside [0, 1]")
    return probs


def serve_forever(host: str, port: int, handler, ready=None, stop=None):
    """Minimal blocking request/response server over the frame protocol.

    ``handler(payload_dict) -> (side, side) float array``. Used by tests
    as a loopback stub; the real neural server lives out of process.
    Malformed frames get an error frame back and close the connection.
    """
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as server:
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        server.bind((host, port))
        server.listen(4)
        server.settimeout(0.2)
        if ready is not None:
            ready.set()
        while stop is None or not stop.is_set():
            try:
                conn, _ = server.accept()
            except socket.timeout:
                continue
            with conn:
                while True:
                    try:
                        ftype, payload = read_frame(conn)
                    except ProtocolViolation as exc:
                        try:
                            conn.sendall(encode_error(str(exc)))
                        except OSError:
                            pass
                        break
                    if ftype != TYPE_REQUEST:
                        conn.sendall(encode_error("expected a request frame"))
                        break
                    try:
                        probs = handler(payload)
                        conn.sendall(encode_response(probs))
                    except Exception as exc:  # handler failure -> error frame
                        conn.sendall(encode_error(str(exc)))
