"""Training pair loading.

A dataset directory (as produced by the simulator's ``collect`` verb)
holds ``NNNNNN.obs.pgm`` / ``NNNNNN.gt.pgm`` pairs plus a
``manifest.json``. The observation file stacks three one-hot planes
vertically (free, uncertain, obstacle; pixel 255 = set); the truth file
uses the map pixel classes 0 = obstacle, 205 = unknown, 254 = free.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import DatasetError
from .pgm import read_pgm


def load_pair(obs_path, gt_path):
    """Return (planes (3, s, s) float32 0/1, target (s, s) float32 obstacle prob,
    uncertain_mask (s, s) float32)."""
    obs = read_pgm(obs_path)
    if obs.shape[0] % 3 != 0:
        raise DatasetError(f"{obs_path}: height {obs.shape[0]} not divisible by 3")
    side = obs.shape[0] // 3
    if obs.shape[1] != side:
        raise DatasetError(f"{obs_path}: planes are not square ({obs.shape})")
    planes = (obs.reshape(3, side, side) == 255).astype(np.float32)

    truth = read_pgm(gt_path)
    if truth.shape != (side, side):
        raise DatasetError(f"{gt_path}: shape {truth.shape} != window side {side}")
    target = np.full((side, side), 0.5, dtype=np.float32)
    target[truth <= 50] = 1.0
    target[truth >= 240] = 0.0
    return planes, target, planes[1].copy()


class PairDataset:
    """All pairs of a dataset directory, loaded eagerly (toy scale)."""

    def __init__(self, root):
        manifest_path = os.path.join(root, "manifest.json")
        if not os.path.exists(manifest_path):
            raise DatasetError(f"no manifest.json in {root}")
        with open(manifest_path) as fh:
            self.manifest = json.load(fh)
        ids = sorted(e["id"] for e in self.manifest.get("entries", []))
        if not ids:
            raise DatasetError(f"{root}: dataset is empty")
        self.samples = []
        for sample_id in ids:
            obs_path = os.path.join(root, f"{sample_id}.obs.pgm")
            gt_path = os.path.join(root, f"{sample_id}.gt.pgm")
            if not (os.path.exists(obs_path) and os.path.exists(gt_path)):
                raise DatasetError(f"{root}: missing files for sample {sample_id}")
            self.samples.append(load_pair(obs_path, gt_path))
        self.side = self.samples[0][0].shape[1]
        if any(s[0].shape[1] != self.side for s in self.samples):
            raise DatasetError(f"{root}: mixed window sides")

    def __len__(self):
        return len(self.samples)

    def split(self, val_fraction: float = 0.1):
        """Deterministic train/validation split (tail of the sorted ids)."""
        val_count = max(1, int(round(len(self.samples) * val_fraction)))
        if val_count >= len(self.samples):
            raise DatasetError("dataset too small to split")
        return self.samples[:-val_count], self.samples[-val_count:]
