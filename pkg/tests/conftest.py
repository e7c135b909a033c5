"""Shared fixtures for the MSGNN test suite."""

import os
from pathlib import Path

import numpy as np
import pytest

from app.imaging import CLEAN_DIR, RAIN_DIR, save_png, synth_rain, synthetic_background
from app.models import MsgnnConfig, RainParams


def pytest_collection_modifyitems(config, items):
    if os.getenv("MSGNN_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set MSGNN_RUN_SLOW=1 to run slow tests")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config() -> MsgnnConfig:
    """Smallest network that still exercises every component."""
    return MsgnnConfig(N=2, M=1, channels=4, k=2, l=3, s=3, seed=3)


def write_pairs(root: Path, count: int, size: int = 32, seed: int = 7) -> Path:
    """Write ``count`` synthetic rainy/clean pairs under ``root``."""
    for i in range(count):
        clean = synthetic_background(size, size, seed + i)
        clean = np.floor(clean * 255.0 + 0.5) / 255.0
        rainy, _ = synth_rain(clean, RainParams(seed=seed + i))
        save_png(clean, root / CLEAN_DIR / f"{i:04d}.png")
        save_png(rainy, root / RAIN_DIR / f"{i:04d}.png")
    return root


@pytest.fixture
def pair_dir(tmp_path: Path) -> Path:
    return write_pairs(tmp_path / "pairs", count=5)


@pytest.fixture
def random_image(rng: np.random.Generator):
    def make(height: int = 16, width: int = 16) -> np.ndarray:
        return rng.random((height, width, 3)).astype(np.float32)
    return make


@pytest.fixture
def pair_factory(tmp_path: Path):
    """Write a fresh dataset: ``pair_factory(name, count, size=32, seed=7)``."""
    def make(name: str, count: int, size: int = 32, seed: int = 7) -> Path:
        return write_pairs(tmp_path / name, count, size, seed)
    return make
