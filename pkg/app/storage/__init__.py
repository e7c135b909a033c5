"""Checkpoint files and metrics logs."""

from .checkpoint import (
    CHECKPOINT_PATTERN,
    FORMAT_VERSION,
    MAGIC,
    Checkpoint,
    latest_checkpoint,
    load_checkpoint,
    save_checkpoint,
)
from .metrics_log import MetricsLog

__all__ = [
    "CHECKPOINT_PATTERN",
    "FORMAT_VERSION",
    "MAGIC",
    "Checkpoint",
    "MetricsLog",
    "latest_checkpoint",
    "load_checkpoint",
    "save_checkpoint",
]
