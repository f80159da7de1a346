"""Dataset over the training-export directory layout.

The exporter writes ``<root>/<class>/<name>.png`` with one directory per
class token. Files are consumed in sorted order so iteration is
deterministic; pixels are scaled to [0, 1] then normalized with the
backbone's pretraining statistics.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch.utils.data import Dataset

from .errors import DatasetError
from .model import CLASS_TOKENS, IMAGENET_MEAN, IMAGENET_STD


class PatchFolderDataset(Dataset):
    def __init__(self, root: str | Path, input_size: int = 299):
        self.root = Path(root)
        self.input_size = input_size
        if not self.root.is_dir():
            raise DatasetError(f"dataset root {self.root} is not a directory")
        self.samples: list[tuple[Path, int]] = []
        for index, token in enumerate(CLASS_TOKENS):
            class_dir = self.root / token
            files = sorted(class_dir.glob("*.png")) if class_dir.is_dir() else []
            if not files:
                raise DatasetError(f"empty class directory: {class_dir}")
            self.samples.extend((path, index) for path in files)
        self._mean = np.asarray(IMAGENET_MEAN, dtype=np.float32)
        self._std = np.asarray(IMAGENET_STD, dtype=np.float32)

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, index: int) -> tuple[torch.Tensor, int]:
        path, label = self.samples[index]
        img = Image.open(path).convert("RGB")
        if img.size != (self.input_size, self.input_size):
            img = img.resize((self.input_size, self.input_size), Image.BILINEAR)
        arr = np.asarray(img, dtype=np.float32) / 255.0
        arr = (arr - self._mean) / self._std
        tensor = torch.from_numpy(arr.transpose(2, 0, 1).copy())
        return tensor, label

    def class_counts(self) -> dict[str, int]:
        counts = {token: 0 for token in CLASS_TOKENS}
        for _, label in self.samples:
            counts[CLASS_TOKENS[label]] += 1
        return counts
