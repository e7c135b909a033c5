"""Training configuration and result models."""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class TrainConfig(BaseModel):
    """Optimizer schedule and data handling for a training run."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    lr: float = Field(5e-4, gt=0, description="Initial learning rate")
    milestones: List[int] = Field(
        default_factory=lambda: [300, 400], description="Epochs at which lr decays"
    )
    decay: float = Field(0.1, gt=0, le=1, description="Multiplicative lr decay per milestone")
    epochs: int = Field(500, ge=1, description="Number of training epochs")
    batch: int = Field(8, ge=1, description="Samples per optimizer step")
    crop: int = Field(64, ge=16, description="Training crop side length")
    seed: int = Field(7, description="Seed for crops, shuffling and exemplar draws")
    adam_beta1: float = Field(0.9, ge=0, lt=1, description="ADAM first moment decay")
    adam_beta2: float = Field(0.999, ge=0, lt=1, description="ADAM second moment decay")
    adam_eps: float = Field(1e-8, gt=0, description="ADAM denominator epsilon")
    max_steps: Optional[int] = Field(None, ge=1, description="Optional optimizer step budget")
    checkpoint_interval: int = Field(1, ge=1, description="Epochs between checkpoints")
    holdout_fraction: float = Field(0.2, ge=0, lt=1, description="Trailing share of pairs held out")
    eval_every: int = Field(1, ge=1, description="Epochs between held-out evaluations")

    @field_validator("milestones", mode="before")
    @classmethod
    def _parse_milestones(cls, value: object) -> object:
        if isinstance(value, str):
            return [int(part) for part in value.split(",") if part.strip()]
        return value

    @field_validator("crop")
    @classmethod
    def _crop_divisible(cls, value: int) -> int:
        if value % 4:
            raise ValueError("crop must be divisible by 4 for quarter-scale patching")
        return value

    @model_validator(mode="after")
    def _milestones_in_range(self) -> "TrainConfig":
        if any(b <= a for a, b in zip(self.milestones, self.milestones[1:])):
            raise ValueError("milestones must be strictly increasing")
        if self.milestones and self.milestones[-1] >= self.epochs:
            raise ValueError("milestones must be smaller than epochs")
        return self


class EpochRecord(BaseModel):
    """One line of the metrics log."""
    epoch: int = Field(..., ge=0, description="Zero-based epoch index")
    loss: float = Field(..., description="Mean training loss of the epoch")
    psnr: float = Field(..., description="Mean held-out PSNR, nan without a held-out split")
    ssim: float = Field(..., description="Mean held-out SSIM, nan without a held-out split")


class EvaluationRow(BaseModel):
    """Per-image evaluation result."""
    name: str = Field(..., description="Image stem")
    psnr: float = Field(..., description="PSNR of the derained output in dB")
    ssim: float = Field(..., description="SSIM of the derained output")
    input_psnr: float = Field(..., description="PSNR of the rainy input in dB")
    input_ssim: float = Field(..., description="SSIM of the rainy input")
