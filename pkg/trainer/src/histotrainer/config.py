"""Training configuration.

Stage 1 trains only the new head with RMSProp; stage 2 additionally
fine-tunes the last two inception blocks with SGD. The unfrozen scope is
pinned by module name so it stays auditable.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class TrainConfig:
    stage1_optimizer: str = "rmsprop"
    stage1_lr: float = 0.001  # conventional RMSProp default
    stage1_epochs: int = 25
    stage2_optimizer: str = "sgd"
    stage2_lr: float = 0.0001
    stage2_momentum: float = 0.9
    stage2_epochs: int = 50
    # final two mixed blocks of the canonical Inception-v3 layer naming
    unfrozen_blocks: tuple[str, ...] = ("Mixed_7b", "Mixed_7c")
    head_hidden: int = 1024
    n_classes: int = 4
    input_size: int = 299
    batch_size: int = 32
    pretrained: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.stage1_epochs < 1 or self.stage2_epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.stage1_lr <= 0 or self.stage2_lr <= 0:
            raise ValueError("learning rates must be > 0")
        if not 0 <= self.stage2_momentum < 1:
            raise ValueError("momentum must be in [0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")
        if self.input_size < 75:
            raise ValueError("input_size must be >= 75 for the backbone")
        object.__setattr__(self, "unfrozen_blocks", tuple(self.unfrozen_blocks))

    def to_dict(self) -> dict:
        record = dataclasses.asdict(self)
        record["unfrozen_blocks"] = list(self.unfrozen_blocks)
        return record

    @classmethod
    def from_dict(cls, record: dict) -> "TrainConfig":
        record = dict(record)
        if "unfrozen_blocks" in record:
            record["unfrozen_blocks"] = tuple(record["unfrozen_blocks"])
        return cls(**record)
