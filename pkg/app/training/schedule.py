"""Step learning-rate schedule."""

from ..errors import ContractError
from ..models.training import TrainConfig


def lr_at(epoch: int, config: TrainConfig) -> float:
    """Learning rate of ``epoch``: ``lr * decay ** (milestones passed)``."""
    if not 0 <= epoch < config.epochs:
        raise ContractError(f"epoch {epoch} is outside [0, {config.epochs})")
    passed = sum(1 for milestone in config.milestones if epoch >= milestone)
    return config.lr * config.decay**passed
