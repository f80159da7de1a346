"""Portable model export plus the native-vs-exported parity harness.

The export is a serialized program graph (.pt2) with softmax included, so
consumers get probability vectors directly. A sidecar metadata record pins
the preprocessing (scale, channel statistics, layout) and the class index
order; the inference side must apply exactly this preprocessing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .config import TrainConfig
from .errors import ExportError
from .model import CLASS_TOKENS, IMAGENET_MEAN, IMAGENET_STD, ProbabilityHead

METADATA_SUFFIX = ".meta.json"


@dataclass(frozen=True)
class ParityResult:
    n_patches: int
    top1_agreement: int
    max_abs_diff: float

    @property
    def perfect_agreement(self) -> bool:
        return self.top1_agreement == self.n_patches


def export_metadata(config: TrainConfig) -> dict:
    return {
        "format": "pt2-exported-program",
        "input": {
            "size": config.input_size,
            "layout": "NCHW",
            "channel_order": "RGB",
            "scale": 1.0 / 255.0,
            "mean": list(IMAGENET_MEAN),
            "std": list(IMAGENET_STD),
        },
        "output": {
            "classes": list(CLASS_TOKENS),
            "activation": "softmax",
        },
    }


def export_model(
    model: nn.Module, out_path: str | Path, config: TrainConfig
) -> tuple[Path, Path]:
    """Serialize the probability-head graph and its metadata sidecar.

    Raises:
        ExportError: graph capture or serialization failed; the message
            carries the underlying operation error.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    wrapped = ProbabilityHead(model).eval()
    example = torch.zeros(2, 3, config.input_size, config.input_size)
    static = torch.export.Dim.STATIC
    batch = torch.export.Dim("batch", min=1, max=512)
    try:
        program = torch.export.export(
            wrapped,
            (example,),
            dynamic_shapes=({0: batch, 1: static, 2: static, 3: static},),
        )
        torch.export.save(program, out_path)
    except Exception as exc:
        raise ExportError(f"model export failed: {exc}") from exc
    meta_path = out_path.with_suffix(out_path.suffix + METADATA_SUFFIX)
    meta_path.write_text(json.dumps(export_metadata(config), indent=2, sort_keys=True) + "\n")
    return out_path, meta_path


def random_patches(n: int, size: int, seed: int) -> np.ndarray:
    """Random 8-bit RGB patches, the parity harness input."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, size=(n, size, size, 3), dtype=np.uint8)


def preprocess(patches: np.ndarray) -> torch.Tensor:
    mean = np.asarray(IMAGENET_MEAN, dtype=np.float32)
    std = np.asarray(IMAGENET_STD, dtype=np.float32)
    arr = patches.astype(np.float32) / 255.0
    arr = (arr - mean) / std
    return torch.from_numpy(arr.transpose(0, 3, 1, 2).copy())


def parity_check(
    model: nn.Module,
    exported_path: str | Path,
    config: TrainConfig,
    n: int = 32,
    seed: int = 2024,
) -> ParityResult:
    """Evaluate random patches natively and through the exported graph."""
    wrapped = ProbabilityHead(model).eval()
    loaded = torch.export.load(str(exported_path)).module()
    batch = preprocess(random_patches(n, config.input_size, seed))
    with torch.inference_mode():
        native = wrapped(batch).cpu().numpy()
        exported = loaded(batch).cpu().numpy()
    agreement = int((native.argmax(axis=1) == exported.argmax(axis=1)).sum())
    max_diff = float(np.abs(native - exported).max())
    return ParityResult(n_patches=n, top1_agreement=agreement, max_abs_diff=max_diff)
