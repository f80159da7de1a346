import json

import numpy as np
import pytest
import torch

from histotrainer import parity_check
from histotrainer.errors import ExportError
from histotrainer.export import export_metadata, export_model, preprocess, random_patches


def test_export_writes_model_and_metadata(exported):
    _, _, model_path, meta_path = exported
    assert model_path.exists()
    assert meta_path.exists()
    assert meta_path.name == "model.pt2.meta.json"


def test_metadata_class_order_is_fixed_convention(exported):
    _, _, _, meta_path = exported
    meta = json.loads(meta_path.read_text())
    assert meta["output"]["classes"] == ["normal", "benign", "insitu", "invasive"]
    assert meta["input"]["size"] == 299
    assert meta["input"]["layout"] == "NCHW"
    assert meta["input"]["channel_order"] == "RGB"
    assert meta["output"]["activation"] == "softmax"


def test_parity_trained_model(exported):
    model, config, model_path, _ = exported
    result = parity_check(model, model_path, config, n=32, seed=11)
    assert result.top1_agreement == 32
    assert result.max_abs_diff < 1e-4


def test_parity_untrained_model(untrained_model, smoke_config, tmp_path):
    # parity is training-independent: a random-head model must round-trip too
    model_path, _ = export_model(untrained_model, tmp_path / "untrained.pt2", smoke_config)
    result = parity_check(untrained_model, model_path, smoke_config, n=8, seed=3)
    assert result.top1_agreement == 8
    assert result.max_abs_diff < 1e-4


def test_exported_graph_accepts_variable_batch(exported):
    _, _, model_path, _ = exported
    module = torch.export.load(str(model_path)).module()
    with torch.inference_mode():
        one = module(torch.rand(1, 3, 299, 299))
        five = module(torch.rand(5, 3, 299, 299))
    assert one.shape == (1, 4)
    assert five.shape == (5, 4)


def test_export_failure_is_export_error(tmp_path, smoke_config):
    class Unexportable(torch.nn.Module):
        def forward(self, x):
            # data-dependent control flow the exporter cannot capture
            if x.sum().item() > 0:
                return x.mean(dim=(1, 2, 3))
            return x.amax(dim=(1, 2, 3))

    with pytest.raises(ExportError):
        export_model(Unexportable(), tmp_path / "bad.pt2", smoke_config)


def test_preprocess_matches_metadata_contract(smoke_config):
    meta = export_metadata(smoke_config)
    patches = random_patches(2, smoke_config.input_size, seed=0)
    tensor = preprocess(patches)
    scale = meta["input"]["scale"]
    mean = np.asarray(meta["input"]["mean"], dtype=np.float32)
    std = np.asarray(meta["input"]["std"], dtype=np.float32)
    manual = (patches.astype(np.float32) * scale - mean) / std
    assert np.allclose(tensor.numpy(), manual.transpose(0, 3, 1, 2), atol=1e-6)
