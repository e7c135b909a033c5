"""Data models for MSGNN."""

from .network import SCALE_FACTORS, AttentionVariant, MsgnnConfig, ScaleTag
from .rain import RainParams
from .training import EpochRecord, EvaluationRow, TrainConfig

__all__ = [
    # Network models
    "MsgnnConfig",
    "ScaleTag",
    "AttentionVariant",
    "SCALE_FACTORS",
    # Training models
    "TrainConfig",
    "EpochRecord",
    "EvaluationRow",
    # Rain models
    "RainParams",
]
