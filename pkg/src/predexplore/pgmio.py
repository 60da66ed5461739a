"""PGM (P5) map file I/O with JSON sidecar metadata.

Follows the common map-server pixel convention: 0 = occupied,
205 = unknown, 254 = free, with tolerance bands when loading
(<=50 obstacle, >=200 free, everything else uncertain). A sidecar
file ``<basename>.meta.json`` carries ``resolution`` (m/cell) and
``origin`` ([x, y] meters); missing sidecars fall back to defaults.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import MalformedPgm
from .grids import FREE, OBSTACLE, UNCERTAIN, ProbabilityGrid, TrinaryGrid

PIXEL_OBSTACLE = 0
PIXEL_UNCERTAIN = 205
PIXEL_FREE = 254

DEFAULT_RESOLUTION = 0.05
DEFAULT_ORIGIN = (0.0, 0.0)

_CLASS_TO_PIXEL = {OBSTACLE: PIXEL_OBSTACLE, UNCERTAIN: PIXEL_UNCERTAIN, FREE: PIXEL_FREE}


def read_pgm(path) -> np.ndarray:
    """Read a binary 8-bit P5 PGM into a (h, w) uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise MalformedPgm(f"{path}: not a binary P5 PGM")
    # header = magic, width, height, maxval; '#' comments allowed between tokens
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
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MalformedPgm(f"{path}: non-numeric header fields") from None
    if maxval != 255:
        raise MalformedPgm(f"{path}: only 8-bit (maxval 255) supported, got {maxval}")
    pixels = data[pos : pos + width * height]
    if len(pixels) != width * height:
        raise MalformedPgm(f"{path}: expected {width * height} pixel bytes, got {len(pixels)}")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)


def write_pgm(path, image: np.ndarray) -> None:
    """Write a (h, w) uint8 array as binary P5 PGM."""
    image = np.asarray(image, dtype=np.uint8)
    height, width = image.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(image.tobytes())


def _sidecar_path(path):
    base, _ = os.path.splitext(str(path))
    return base + ".meta.json"


def load_map(path) -> TrinaryGrid:
    """Load a PGM map into a trinary grid, with sidecar resolution/origin."""
    if not os.path.exists(path):
        raise IOError(f"map file not found: {path}")
    image = read_pgm(path)
    cells = np.full(image.shape, UNCERTAIN, dtype=np.uint8)
    cells[image <= 50] = OBSTACLE
    # free band starts above the 205 unknown pixel so load(save(g)) == g
    cells[image >= 240] = FREE
    resolution, origin = DEFAULT_RESOLUTION, DEFAULT_ORIGIN
    sidecar = _sidecar_path(path)
    if os.path.exists(sidecar):
        with open(sidecar) as fh:
            meta = json.load(fh)
        resolution = float(meta.get("resolution", DEFAULT_RESOLUTION))
        origin = tuple(meta.get("origin", DEFAULT_ORIGIN))
    return TrinaryGrid(cells, resolution, origin)


def save_snapshot(grid, path) -> None:
    """Write a trinary or probability grid as a P5 PGM snapshot.

    Trinary grids use the {0, 205, 254} class pixels; probability grids map
    p -> round(255 * (1 - p)) so certain obstacles render black.
    """
    if isinstance(grid, TrinaryGrid):
        image = np.zeros(grid.cells.shape, dtype=np.uint8)
        for cls, pix in _CLASS_TO_PIXEL.items():
            image[grid.cells == cls] = pix
    elif isinstance(grid, ProbabilityGrid):
        image = np.rint(255.0 * (1.0 - grid.cells)).astype(np.uint8)
    else:
        raise TypeError(f"cannot snapshot {type(grid).__name__}")
    write_pgm(path, image)
    with open(_sidecar_path(path), "w") as fh:
        json.dump({"resolution": grid.resolution, "origin": list(grid.origin)}, fh)
        fh.write("\n")
