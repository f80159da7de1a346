"""Two-stage fine-tuning loop.

Stage 1 trains the new head with the backbone frozen (parameters and
normalization statistics both fixed); stage 2 continues with the pinned
last two inception blocks unfrozen. Loss is categorical cross-entropy.
Runs are deterministic for a fixed seed with single-threaded data order.
"""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn
from torch.utils.data import DataLoader

from .config import TrainConfig
from .data import PatchFolderDataset
from .model import apply_stage, build_model, set_train_mode

CHECKPOINT_FILENAME = "checkpoint.pt"
LOG_FILENAME = "training_log.jsonl"


@dataclass(frozen=True)
class EpochStats:
    stage: int
    epoch: int
    loss: float
    accuracy: float


@dataclass(frozen=True)
class TrainResult:
    checkpoint_path: Path
    history: tuple[EpochStats, ...]


def seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed % 2**32)
    torch.manual_seed(seed)


def _make_optimizer(stage: int, model: nn.Module, config: TrainConfig):
    params = [p for p in model.parameters() if p.requires_grad]
    if stage == 1:
        if config.stage1_optimizer != "rmsprop":
            raise ValueError(f"unsupported stage-1 optimizer {config.stage1_optimizer}")
        return torch.optim.RMSprop(params, lr=config.stage1_lr)
    if config.stage2_optimizer != "sgd":
        raise ValueError(f"unsupported stage-2 optimizer {config.stage2_optimizer}")
    return torch.optim.SGD(params, lr=config.stage2_lr, momentum=config.stage2_momentum)


def run_epoch(model, loader, optimizer, loss_fn) -> tuple[float, float]:
    set_train_mode(model)
    total_loss = 0.0
    total_correct = 0
    total_items = 0
    for inputs, targets in loader:
        optimizer.zero_grad()
        logits = model(inputs)
        loss = loss_fn(logits, targets)
        loss.backward()
        optimizer.step()
        batch = targets.shape[0]
        total_loss += float(loss.detach()) * batch
        total_correct += int((logits.detach().argmax(dim=1) == targets).sum())
        total_items += batch
    return total_loss / total_items, total_correct / total_items


def train_two_stage(
    dataset_root: str | Path,
    config: TrainConfig = TrainConfig(),
    out_dir: str | Path = "train_out",
) -> TrainResult:
    """Run both stages over an exported patch dataset; write a checkpoint.

    Determinism: for a fixed config.seed and the default single-process
    data loading, repeated runs produce identical logs (CPU backend).

    Raises:
        DatasetError: missing or empty class directories.
        SetupError: pretrained weights requested but unavailable.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed_everything(config.seed)
    dataset = PatchFolderDataset(dataset_root, input_size=config.input_size)
    model = build_model(config)
    loss_fn = nn.CrossEntropyLoss()

    history: list[EpochStats] = []
    for stage, epochs in ((1, config.stage1_epochs), (2, config.stage2_epochs)):
        apply_stage(model, stage, config)
        optimizer = _make_optimizer(stage, model, config)
        loader = DataLoader(
            dataset,
            batch_size=config.batch_size,
            shuffle=True,
            num_workers=0,
            generator=torch.Generator().manual_seed(config.seed + stage),
        )
        for epoch in range(epochs):
            loss, accuracy = run_epoch(model, loader, optimizer, loss_fn)
            history.append(EpochStats(stage, epoch, loss, accuracy))

    checkpoint_path = out / CHECKPOINT_FILENAME
    torch.save(
        {
            "state_dict": model.state_dict(),
            "config": config.to_dict(),
            "history": [dataclasses.asdict(h) for h in history],
        },
        checkpoint_path,
    )
    (out / LOG_FILENAME).write_text(
        "\n".join(json.dumps(dataclasses.asdict(h), sort_keys=True) for h in history) + "\n"
    )
    return TrainResult(checkpoint_path=checkpoint_path, history=tuple(history))


def load_checkpoint(path: str | Path) -> tuple[nn.Module, TrainConfig]:
    record = torch.load(Path(path), map_location="cpu", weights_only=True)
    config = TrainConfig.from_dict(record["config"])
    # weights are restored explicitly; never re-fetch the pretrained set
    model = build_model(dataclasses.replace(config, pretrained=False))
    model.load_state_dict(record["state_dict"])
    return model, config
