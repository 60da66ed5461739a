import json

import numpy as np
import pytest

from neuralpred.dataset import PairDataset, load_pair
from neuralpred.errors import DatasetError


def write_pgm(path, image):
    image = np.asarray(image, dtype=np.uint8)
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(image.tobytes())


def make_pair(root, sample_id, side=16, seed=0):
    rng = np.random.default_rng(seed)
    classes = rng.integers(0, 3, (side, side))
    planes = np.zeros((3, side, side), dtype=np.uint8)
    for k in range(3):
        planes[k][classes == k] = 255
    write_pgm(root / f"{sample_id}.obs.pgm", planes.reshape(3 * side, side))
    truth = rng.choice([0, 205, 254], (side, side)).astype(np.uint8)
    write_pgm(root / f"{sample_id}.gt.pgm", truth)
    return classes, truth


def make_dataset(root, count=5, side=16):
    entries = []
    for i in range(count):
        make_pair(root, f"{i:06d}", side=side, seed=i)
        entries.append({"id": f"{i:06d}"})
    (root / "manifest.json").write_text(json.dumps({"samples": count, "entries": entries}))


class TestLoadPair:
    def test_decodes_planes_and_target(self, tmp_path):
        classes, truth = make_pair(tmp_path, "000000")
        planes, target, mask = load_pair(
            tmp_path / "000000.obs.pgm", tmp_path / "000000.gt.pgm"
        )
        assert planes.shape == (3, 16, 16)
        assert np.array_equal(planes.argmax(axis=0), classes)
        assert np.array_equal(mask, (classes == 1).astype(np.float32))
        assert np.array_equal(target == 1.0, truth <= 50)
        assert np.array_equal(target == 0.0, truth >= 240)
        assert np.all(target[(truth > 50) & (truth < 240)] == 0.5)

    def test_rejects_non_stacked_observation(self, tmp_path):
        write_pgm(tmp_path / "bad.obs.pgm", np.zeros((16, 16)))
        write_pgm(tmp_path / "bad.gt.pgm", np.zeros((16, 16)))
        with pytest.raises(DatasetError):
            load_pair(tmp_path / "bad.obs.pgm", tmp_path / "bad.gt.pgm")


class TestPairDataset:
    def test_loads_all_samples(self, tmp_path):
        make_dataset(tmp_path, count=5)
        dataset = PairDataset(tmp_path)
        assert len(dataset) == 5
        assert dataset.side == 16

    def test_split_is_deterministic_tail(self, tmp_path):
        make_dataset(tmp_path, count=10)
        dataset = PairDataset(tmp_path)
        train, val = dataset.split(0.2)
        assert len(train) == 8 and len(val) == 2
        train2, val2 = PairDataset(tmp_path).split(0.2)
        assert np.array_equal(val[0][0], val2[0][0])

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DatasetError):
            PairDataset(tmp_path)

    def test_missing_pair_file(self, tmp_path):
        make_dataset(tmp_path, count=2)
        (tmp_path / "000001.gt.pgm").unlink()
        with pytest.raises(DatasetError):
            PairDataset(tmp_path)

    def test_empty_dataset(self, tmp_path):
        (tmp_path / "manifest.json").write_text(json.dumps({"samples": 0, "entries": []}))
        with pytest.raises(DatasetError):
            PairDataset(tmp_path)
