import os

import numpy as np
import pytest

from waterfall.main import Settings

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def config_path():
    def _path(name: str) -> str:
        return os.path.join(CONFIGS, name)
    return _path


@pytest.fixture
def settings(tmp_path):
    """Quiet single-process settings writing under tmp_path"""
    return Settings(out_dir=str(tmp_path / "results"), workers=1, batch_size=64, progress=False)
