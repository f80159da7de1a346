"""Two-stage transfer-learning trainer for the patch classifier, with
portable model export consumed by the inference pipeline."""

from .config import TrainConfig
from .data import PatchFolderDataset
from .errors import DatasetError, ExportError, SetupError, TrainerError
from .export import ParityResult, export_model, parity_check
from .model import CLASS_TOKENS, ProbabilityHead, apply_stage, build_model
from .train import TrainResult, load_checkpoint, train_two_stage

__version__ = "0.1.0"

__all__ = [
    "CLASS_TOKENS",
    "DatasetError",
    "ExportError",
    "ParityResult",
    "PatchFolderDataset",
    "ProbabilityHead",
    "SetupError",
    "TrainConfig",
    "TrainResult",
    "TrainerError",
    "apply_stage",
    "build_model",
    "export_model",
    "load_checkpoint",
    "parity_check",
    "train_two_stage",
]
