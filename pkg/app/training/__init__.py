"""Loss, optimizer, schedule, exemplar sampling, training and evaluation."""

from .evaluation import MEAN_ROW, evaluate, format_table, write_report
from .exemplar import draw_exemplar_index, sample_exemplar
from .loss import ssim_loss
from .optimizer import OptimizerState, adam_step
from .schedule import lr_at
from .trainer import METRICS_FILE, Trainer, TrainingResult, train

__all__ = [
    "MEAN_ROW",
    "METRICS_FILE",
    "OptimizerState",
    "Trainer",
    "TrainingResult",
    "adam_step",
    "draw_exemplar_index",
    "evaluate",
    "format_table",
    "lr_at",
    "sample_exemplar",
    "ssim_loss",
    "train",
    "write_report",
]
