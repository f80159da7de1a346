"""Shared fixtures. The expensive pieces (model build, the smoke training
run, the graph export) are session-scoped so each happens once."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from histotrainer import TrainConfig, build_model, export_model, train_two_stage
from histotrainer.model import CLASS_TOKENS
from histotrainer.train import load_checkpoint


def write_patch_dataset(root: Path, per_class: int, size: int = 299, seed: int = 0) -> Path:
    rng = np.random.default_rng(seed)
    for token in CLASS_TOKENS:
        class_dir = root / token
        class_dir.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            arr = rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)
            Image.fromarray(arr).save(class_dir / f"{token}_{i:03d}.png")
    return root


@pytest.fixture(scope="session")
def toy_dataset(tmp_path_factory) -> Path:
    # the 40-patch toy set: 10 patches per class
    return write_patch_dataset(tmp_path_factory.mktemp("toy40"), per_class=10)


@pytest.fixture(scope="session")
def mini_dataset(tmp_path_factory) -> Path:
    return write_patch_dataset(tmp_path_factory.mktemp("mini8"), per_class=2, seed=1)


@pytest.fixture(scope="session")
def smoke_config() -> TrainConfig:
    return TrainConfig(
        pretrained=False,
        batch_size=8,
        stage1_epochs=3,
        stage2_epochs=3,
        seed=123,
    )


@pytest.fixture(scope="session")
def smoke_run(toy_dataset, smoke_config, tmp_path_factory):
    out = tmp_path_factory.mktemp("smoke_out")
    return train_two_stage(toy_dataset, smoke_config, out)


@pytest.fixture(scope="session")
def untrained_model(smoke_config):
    return build_model(smoke_config)


@pytest.fixture(scope="session")
def exported(smoke_run, tmp_path_factory):
    """(model, config, model_path, meta_path) for the smoke checkpoint."""
    model, config = load_checkpoint(smoke_run.checkpoint_path)
    out = tmp_path_factory.mktemp("export") / "model.pt2"
    model_path, meta_path = export_model(model, out, config)
    return model, config, model_path, meta_path
