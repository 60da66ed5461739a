"""Frame protocol for serving predictions over TCP.

Every frame starts with the 4 ASCII bytes ``SXP1`` and a type byte;
integers and floats are little-endian.

* 0x01 request: side u32, resolution f32, robot_col u32, robot_row u32,
  then 3*side*side payload bytes (free, uncertain, obstacle planes,
  values 0/255).
* 0x02 response: side u32, then side*side f32 obstacle probabilities,
  row-major.
* 0xFF error: length u32, then a UTF-8 message.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ProtocolViolation

MAGIC = b"SXP1"
TYPE_REQUEST = 0x01
TYPE_RESPONSE = 0x02
TYPE_ERROR = 0xFF

_REQUEST_HEADER = struct.Struct("<IfII")


def recv_exact(sock, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ProtocolViolation(f"connection closed mid-frame ({len(buf)}/{n} bytes)")
        buf += chunk
    return buf


def read_request(sock) -> dict:
    """Read one frame and require a request."""
    magic = recv_exact(sock, 4)
    if magic != MAGIC:
        raise ProtocolViolation(f"bad magic {magic!r}")
    ftype = recv_exact(sock, 1)[0]
    if ftype != TYPE_REQUEST:
        raise ProtocolViolation(f"expected request frame, got type 0x{ftype:02x}")
    side, resolution, robot_col, robot_row = _REQUEST_HEADER.unpack(
        recv_exact(sock, _REQUEST_HEADER.size)
    )
    if side < 8:
        raise ProtocolViolation(f"request side {side} < 8")
    raw = recv_exact(sock, 3 * side * side)
    planes = np.frombuffer(raw, dtype=np.uint8).reshape(3, side, side)
    return {
        "side": side,
        "resolution": resolution,
        "robot_cell": (robot_col, robot_row),
        "free": planes[0],
        "uncertain": planes[1],
        "obstacle": planes[2],
    }


def encode_response(probs: np.ndarray) -> bytes:
    probs = np.asarray(probs, dtype="<f4")
    side = probs.shape[0]
    if probs.shape != (side, side):
        raise ValueError(f"response must be square, got {probs.shape}")
    return MAGIC + bytes([TYPE_RESPONSE]) + struct.pack("<I", side) + probs.tobytes()


def encode_error(message: str) -> bytes:
    raw = message.encode("utf-8")
    return MAGIC + bytes([TYPE_ERROR]) + struct.pack("<I", len(raw)) + raw


def encode_request(side, resolution, robot_col, robot_row, planes: bytes) -> bytes:
    """Client-side encoding; used by tests to fuzz the server."""
    if len(planes) != 3 * side * side:
        raise ValueError(f"payload must be 3*side^2 bytes, got {len(planes)}")
    return (
        MAGIC
        + bytes([TYPE_REQUEST])
        + _REQUEST_HEADER.pack(side, resolution, robot_col, robot_row)
        + planes
    )


def read_response(sock):
    """Client-side frame read; returns probs array or raises on error frame."""
    magic = recv_exact(sock, 4)
    if magic != MAGIC:
        raise ProtocolViolation(f"bad magic {magic!r}")
    ftype = recv_exact(sock, 1)[0]
    if ftype == TYPE_ERROR:
        (length,) = struct.unpack("<I", recv_exact(sock, 4))
        return None, recv_exact(sock, length).decode("utf-8", errors="replace")
    if ftype != TYPE_RESPONSE:
        raise ProtocolViolation(f"expected response frame, got type 0x{ftype:02x}")
    (side,) = struct.unpack("<I", recv_exact(sock, 4))
    raw = recv_exact(sock, 4 * side * side)
    return np.frombuffer(raw, dtype="<f4").reshape(side, side).copy(), None
