"""Minimal binary (P5) PGM reading for the training pair files."""

from __future__ import annotations

import numpy as np

from .errors import MalformedPgm


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise MalformedPgm(f"{path}: not a binary P5 PGM")
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise MalformedPgm(f"{path}: truncated header")
        tokens.append(data[start:pos])
    pos += 1
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MalformedPgm(f"{path}: non-numeric header fields") from None
    if maxval != 255:
        raise MalformedPgm(f"{path}: only maxval 255 supported, got {maxval}")
    pixels = data[pos : pos + width * height]
    if len(pixels) != width * height:
        raise MalformedPgm(f"{path}: expected {width * height} pixel bytes, got {len(pixels)}")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)
