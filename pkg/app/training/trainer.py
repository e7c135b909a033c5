"""The training loop."""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from ..errors import CheckpointError, DatasetError
from ..imaging.dataset import PairedDataset, random_crop
from ..imaging.io import image_to_tensor
from ..models.network import MsgnnConfig
from ..models.training import EpochRecord, TrainConfig
from ..network import ParameterStore, forward
from ..storage import CHECKPOINT_PATTERN, MetricsLog, load_checkpoint, save_checkpoint
from ..tensor import GradientMap, Tensor, backward
from .evaluation import MEAN_ROW, evaluate
from .exemplar import sample_exemplar
from .loss import ssim_loss
from .optimizer import OptimizerState, adam_step
from .schedule import lr_at

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.tsv"


@dataclass
class TrainingResult:
    """What a finished run leaves behind."""

    params: ParameterStore
    state: OptimizerState
    records: List[EpochRecord]
    checkpoint: Optional[Path]
    step_losses: List[float] = field(default_factory=list)


def _accumulate(total: GradientMap, grads: GradientMap) -> None:
    for param, grad in grads.items():
        if param in total:
            total[param] = Tensor(total[param].data + grad.data)
        else:
            total[param] = grad


class Trainer:
    """Runs epochs of random paired crops through the network with ADAM.

    Every epoch draws from its own generator ``default_rng([seed, epoch])``,
    so a run resumed from any checkpoint replays the same draws.
    """

    def __init__(
        self,
        dataset: PairedDataset,
        model_config: MsgnnConfig,
        train_config: TrainConfig,
        output_dir: Union[str, Path],
        params: Optional[ParameterStore] = None,
    ):
        """Initialize the trainer.

        Args:
            dataset (PairedDataset): All pairs; the trailing
                ``holdout_fraction`` is kept for evaluation.
            model_config (MsgnnConfig): Network architecture.
            train_config (TrainConfig): Schedule and data handling.
            output_dir: Directory for checkpoints and the metrics log.
            params (Optional[ParameterStore]): Starting parameters; fresh
                ones from ``model_config.seed`` when omitted.
        """
        self.model_config = model_config
        self.train_config = train_config
        self.output_dir = Path(output_dir)
        self.train_set, self.heldout = dataset.split(train_config.holdout_fraction)
        if len(self.train_set) == 0:
            raise DatasetError(f"no training pairs left after holding out {len(self.heldout)}")
        self.params = params or ParameterStore.initialize(model_config)
        self.state = OptimizerState.zeros(self.params)
        self.metrics = MetricsLog(self.output_dir / METRICS_FILE)
        self.epoch = 0
        self.steps_in_epoch = 0
        self.epoch_loss_sum = 0.0
        self.epoch_samples = 0
        self.step_losses: List[float] = []

    def resume(self, path: Union[str, Path]) -> None:
        """Continue from a checkpoint written by this trainer."""
        checkpoint = load_checkpoint(path, self.model_config)
        if "steps_in_epoch" not in checkpoint.extra:
            raise CheckpointError(f"{path} carries no training position")
        self.params = checkpoint.params
        self.state = OptimizerState.restore(
            self.params, checkpoint.first_moments, checkpoint.second_moments, checkpoint.step
        )
        self.epoch = checkpoint.epoch
        self.steps_in_epoch = int(checkpoint.extra["steps_in_epoch"])
        self.epoch_loss_sum = float(checkpoint.extra.get("epoch_loss_sum", 0.0))
        self.epoch_samples = int(checkpoint.extra.get("epoch_samples", 0))
        self.metrics.truncate_after(self.epoch - 1)
        logger.info(f"Resuming at epoch {self.epoch}, step {self.state.step}")

    def _budget_left(self) -> bool:
        budget = self.train_config.max_steps
        return budget is None or self.state.step < budget

    def _checkpoint(self) -> Path:
        path = self.output_dir / CHECKPOINT_PATTERN.format(epoch=self.epoch)
        if self.steps_in_epoch:
            path = path.with_name(f"{path.stem}_step{self.state.step:06d}.ckpt")
        return save_checkpoint(
            path,
            self.model_config,
            self.params,
            epoch=self.epoch,
            step=self.state.step,
            first_moments=self.state.first,
            second_moments=self.state.second,
            extra={
                "steps_in_epoch": self.steps_in_epoch,
                "epoch_loss_sum": self.epoch_loss_sum,
                "epoch_samples": self.epoch_samples,
                "train": self.train_config.model_dump(mode="json"),
            },
        )

    def _held_out_metrics(self, epoch: int, force: bool = False) -> Tuple[float, float]:
        cfg = self.train_config
        due = (epoch + 1) % cfg.eval_every == 0 or epoch + 1 == cfg.epochs
        if len(self.heldout) == 0 or not (due or force):
            return math.nan, math.nan
        frame = evaluate(self.heldout, self.params, self.model_config)
        means = frame[frame["name"] == MEAN_ROW].iloc[0]
        return float(means["psnr"]), float(means["ssim"])

    def _step(self, batch: List[Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]], lr: float) -> float:
        cfg = self.train_config
        total = GradientMap()
        batch_loss = 0.0
        weight = 1.0 / len(batch)
        for rainy, clean, exemplar in batch:
            background, _ = forward(rainy, exemplar, self.params, self.model_config)
            loss = ssim_loss(background, image_to_tensor(clean))
            batch_loss += loss.item()
            _accumulate(total, backward(loss * weight))
        adam_step(self.params, total, self.state, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)
        return batch_loss

    def run_epoch(self) -> bool:
        """Train one epoch (or its remainder); False once the step budget ran out."""
        cfg = self.train_config
        rng = np.random.default_rng([cfg.seed, self.epoch])
        order = rng.permutation(len(self.train_set))
        lr = lr_at(self.epoch, cfg)
        use_exemplar = self.model_config.use_exemplar and self.model_config.use_graph

        for batch_index, start in enumerate(range(0, len(order), cfg.batch)):
            batch = []
            for index in order[start:start + cfg.batch]:
                pair = self.train_set[int(index)]
                rainy, clean = random_crop(rng, cfg.crop, pair.rainy, pair.clean)
                exemplar = sample_exemplar(self.train_set, rng, int(index), cfg.crop) if use_exemplar else None
                batch.append((rainy, clean, exemplar))
            if batch_index < self.steps_in_epoch:
                # Already trained before the checkpoint; draws are replayed only.
                continue
            if not self._budget_left():
                return False

            batch_loss = self._step(batch, lr)
            self.step_losses.append(batch_loss / len(batch))
            self.epoch_loss_sum += batch_loss
            self.epoch_samples += len(batch)
            self.steps_in_epoch += 1
            logger.debug(f"epoch {self.epoch} step {self.state.step}: loss {batch_loss / len(batch):.6f}")
        return True

    def _record_epoch(self, complete: bool) -> EpochRecord:
        loss = self.epoch_loss_sum / max(self.epoch_samples, 1)
        psnr_value, ssim_value = self._held_out_metrics(self.epoch, force=not complete)
        record = EpochRecord(epoch=self.epoch, loss=loss, psnr=psnr_value, ssim=ssim_value)
        self.metrics.append(record)
        suffix = "" if complete else f" (stopped after {self.steps_in_epoch} steps)"
        logger.info(
            f"Epoch {self.epoch}: loss {loss:.6f}, held-out PSNR {psnr_value:.3f}, SSIM {ssim_value:.4f}{suffix}"
        )
        return record

    def fit(self) -> TrainingResult:
        """Train until ``epochs`` are done or ``max_steps`` is reached.

        A run stopped by the step budget inside an epoch logs the partial
        epoch and checkpoints its position; resuming replaces that record.
        """
        cfg = self.train_config
        last_checkpoint: Optional[Path] = None
        logger.info(
            f"Training on {len(self.train_set)} pairs ({len(self.heldout)} held out) for {cfg.epochs} epochs"
        )
        while self.epoch < cfg.epochs:
            finished = self.run_epoch()
            if not finished and self.steps_in_epoch == 0:
                break
            self._record_epoch(complete=finished)
            if not finished:
                last_checkpoint = self._checkpoint()
                break

            self.epoch += 1
            self.steps_in_epoch = 0
            self.epoch_loss_sum = 0.0
            self.epoch_samples = 0
            if self.epoch % cfg.checkpoint_interval == 0 or self.epoch == cfg.epochs or not self._budget_left():
                last_checkpoint = self._checkpoint()
            if not self._budget_left():
                break

        return TrainingResult(
            params=self.params,
            state=self.state,
            records=self.metrics.records(),
            checkpoint=last_checkpoint,
            step_losses=list(self.step_losses),
        )


def train(
    dataset: PairedDataset,
    model_config: MsgnnConfig,
    train_config: TrainConfig,
    output_dir: Union[str, Path],
    resume: Optional[Union[str, Path]] = None,
) -> TrainingResult:
    """Train a fresh network, or continue from ``resume``."""
    trainer = Trainer(dataset, model_config, train_config, output_dir)
    if resume is not None:
        trainer.resume(resume)
    return trainer.fit()
