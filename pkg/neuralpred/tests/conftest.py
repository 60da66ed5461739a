import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from sim_cli import run_cli  # noqa: E402


@pytest.fixture(scope="session")
def pair_dataset(tmp_path_factory):
    """200 training pairs at window side 64, collected from 4 generated maps."""
    root = tmp_path_factory.mktemp("pairs")
    corpus = root / "maps"
    corpus.mkdir()
    for seed in (1, 2, 3, 4):
        run_cli("genmap", corpus / f"w{seed}.pgm", "--seed", seed)
    out = root / "dataset"
    run_cli("collect", corpus, "--samples", 200, "--seed", 5, "--out", out, "--side", 64)
    return out
