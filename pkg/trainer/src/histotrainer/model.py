"""Modified Inception-v3: GAP -> 1024-unit FC -> 4-way softmax head.

The stock top FC layer is replaced; the built-in adaptive average pool is
the global-average-pooling stage. Stage freezing works at parameter level
plus eval-mode for frozen modules, so normalization statistics stay fixed
too and a frozen backbone is bit-identical after training steps.
"""

from __future__ import annotations

import torch
import torchvision
from torch import nn

from .config import TrainConfig
from .errors import SetupError

# Class index order shared with the inference side (fixed convention).
CLASS_TOKENS = ("normal", "benign", "insitu", "invasive")

# ImageNet channel statistics; the backbone's pretraining convention.
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


def build_model(config: TrainConfig = TrainConfig()) -> nn.Module:
    """Construct the modified backbone; head outputs raw logits.

    Raises:
        SetupError: config asks for pretrained weights but they cannot be
            found or fetched.
    """
    if config.pretrained:
        try:
            weights = torchvision.models.Inception_V3_Weights.IMAGENET1K_V1
            model = torchvision.models.inception_v3(weights=weights)
        except Exception as exc:
            raise SetupError(
                f"pretrained backbone weights unavailable ({exc}); "
                "fetch them into the torch cache or set pretrained=False"
            ) from exc
        # the auxiliary training branch is not part of this architecture
        model.aux_logits = False
        model.AuxLogits = None
    else:
        model = torchvision.models.inception_v3(
            weights=None, aux_logits=False, init_weights=True
        )
    feature_width = model.fc.in_features
    model.fc = nn.Sequential(
        nn.Linear(feature_width, config.head_hidden),
        nn.ReLU(),
        nn.Linear(config.head_hidden, config.n_classes),
    )
    return model


class ProbabilityHead(nn.Module):
    """Wraps the logits model with softmax for inference and export."""

    def __init__(self, model: nn.Module):
        super().__init__()
        self.model = model

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.model(x), dim=1)


def backbone_feature_width(model: nn.Module) -> int:
    return model.fc[0].in_features


def head_module(model: nn.Module) -> nn.Module:
    return model.fc


def apply_stage(model: nn.Module, stage: int, config: TrainConfig) -> None:
    """Set the trainable parameter scope for a training stage.

    Stage 1: only the new head. Stage 2: the pinned last blocks + head.
    """
    if stage not in (1, 2):
        raise ValueError(f"stage must be 1 or 2, got {stage}")
    for param in model.parameters():
        param.requires_grad_(False)
    trainable_modules = [model.fc]
    if stage == 2:
        for name in config.unfrozen_blocks:
            trainable_modules.append(getattr(model, name))
    for module in trainable_modules:
        for param in module.parameters():
            param.requires_grad_(True)


def set_train_mode(model: nn.Module) -> None:
    """train() with frozen modules kept in eval mode.

    A module counts as frozen when none of its own or descendant parameters
    require grad; keeping it in eval mode stops batch-norm running-stat
    updates, so frozen weights AND buffers stay bit-identical.
    """
    model.train()
    for module in model.modules():
        params = list(module.parameters())
        if params and not any(p.requires_grad for p in params):
            module.eval()


def trainable_parameter_names(model: nn.Module) -> list[str]:
    return [name for name, p in model.named_parameters() if p.requires_grad]


def frozen_state_clone(model: nn.Module) -> dict[str, torch.Tensor]:
    """Clone of every non-trainable tensor (parameters and buffers)."""
    out = {}
    for name, param in model.named_parameters():
        if not param.requires_grad:
            out[name] = param.detach().clone()
    for name, buf in model.named_buffers():
        if not _owning_module_trainable(model, name):
            out[name] = buf.detach().clone()
    return out


def _owning_module_trainable(model: nn.Module, buffer_name: str) -> bool:
    owner = model
    for part in buffer_name.split(".")[:-1]:
        owner = getattr(owner, part)
    return any(p.requires_grad for p in owner.parameters())
