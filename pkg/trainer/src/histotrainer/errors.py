"""Trainer exception types."""


class TrainerError(Exception):
    """Base class for trainer errors."""


class SetupError(TrainerError):
    """Pretrained backbone weights are unavailable."""


class DatasetError(TrainerError):
    """Training-export directory is missing, empty or malformed."""


class ExportError(TrainerError):
    """Serialized-graph export failed (unsupported operation or I/O)."""
