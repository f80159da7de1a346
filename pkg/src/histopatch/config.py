"""Run configuration: every pipeline constant in one serializable record.

The JSON form mirrors the dataclass fields; unknown keys are rejected so a
typo'd config fails loudly. The default config path can be pinned with the
``HISTOPATCH_CONFIG`` environment variable.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .bluemask import MaskConfig
from .errors import ConfigError
from .tiler import DEFAULT_PATCH_SIZE, DEFAULT_STRIDE

CONFIG_ENV_VAR = "HISTOPATCH_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    mask: MaskConfig = field(default_factory=MaskConfig)
    patch_size: int = DEFAULT_PATCH_SIZE
    stride: int = DEFAULT_STRIDE
    backend: str = "stub"  # "stub" or a model file path
    stub_constant: tuple[float, float, float, float] | None = None
    model_meta: str | None = None  # sidecar metadata; default <model>.meta.json
    seed: int = 0
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        if self.patch_size < 1:
            raise ConfigError(f"patch_size must be >= 1, got {self.patch_size}")
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.stub_constant is not None:
            vals = tuple(float(v) for v in self.stub_constant)
            if len(vals) != 4:
                raise ConfigError("stub_constant must have 4 entries")
            object.__setattr__(self, "stub_constant", vals)

    def to_json(self) -> str:
        record = dataclasses.asdict(self)
        record["mask"] = dataclasses.asdict(self.mask)
        return json.dumps(record, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, record: dict) -> "RunConfig":
        record = dict(record)
        mask_record = record.pop("mask", {})
        known_mask = {f.name for f in dataclasses.fields(MaskConfig)}
        unknown = set(mask_record) - known_mask
        if unknown:
            raise ConfigError(f"unknown mask config keys: {sorted(unknown)}")
        if "image_tier_bounds" in mask_record:
            mask_record["image_tier_bounds"] = tuple(mask_record["image_tier_bounds"])
        if "tier_counts" in mask_record:
            mask_record["tier_counts"] = tuple(mask_record["tier_counts"])
        known = {f.name for f in dataclasses.fields(cls)} - {"mask"}
        unknown = set(record) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if record.get("stub_constant") is not None:
            record["stub_constant"] = tuple(record["stub_constant"])
        return cls(mask=MaskConfig(**mask_record), **record)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise ConfigError("config JSON must be an object")
        return cls.from_dict(record)


def load_config(path: str | Path | None = None) -> RunConfig:
    """Load a config file; fall back to $HISTOPATCH_CONFIG, then defaults."""
    if path is None:
        env = os.environ.get(CONFIG_ENV_VAR)
        if not env:
            return RunConfig()
        path = env
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return RunConfig.from_json(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
