"""Network configuration models."""

from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ScaleTag(str, Enum):
    """Which image a feature map was extracted from."""
    FULL = "full"
    HALF = "half"
    QUARTER = "quarter"
    EXEMPLAR = "exemplar"


class AttentionVariant(str, Enum):
    """Channel gate used inside the residual blocks."""
    CT = "CT"
    SE = "SE"
    NONE = "none"


SCALE_FACTORS = {ScaleTag.FULL: 1, ScaleTag.HALF: 2, ScaleTag.QUARTER: 4}


class MsgnnConfig(BaseModel):
    """Hyperparameters of the deraining network and its graph model."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)

    n_subnets: int = Field(4, ge=1, alias="N", description="Number of sub-networks")
    n_blocks: int = Field(8, ge=1, alias="M", description="Residual blocks per sub-network")
    channels: int = Field(32, ge=4, description="Feature width of backbone and graph model")
    k: int = Field(5, ge=1, description="Nearest neighbors per query patch")
    patch_size: int = Field(3, ge=1, alias="l", description="Graph patch side length")
    stride: int = Field(3, ge=1, alias="s", description="Graph patch stride")
    leaky_slope: float = Field(0.2, gt=0, lt=1, description="LeakyReLU negative slope")
    use_exemplar: bool = Field(True, description="Relate the input to an external exemplar")
    scales: List[ScaleTag] = Field(
        default_factory=lambda: [ScaleTag.FULL, ScaleTag.HALF, ScaleTag.QUARTER],
        description="Internal scales the input is related to",
    )
    attention_variant: AttentionVariant = Field(
        AttentionVariant.CT, description="Channel gate inside residual blocks"
    )
    use_fusion: bool = Field(True, description="Dense fusion connections between sub-networks")
    use_graph: bool = Field(True, description="Inject graph features into the backbone")
    inject_stride: int = Field(1, ge=1, le=2, description="Stride of the injection convolutions")
    seed: int = Field(0, description="Parameter initialization seed")

    @field_validator("scales", mode="before")
    @classmethod
    def _parse_scales(cls, value: object) -> object:
        if isinstance(value, str):
            if value.strip().lower() in ("", "none"):
                return []
            return [part.strip() for part in value.replace(",", "+").split("+") if part.strip()]
        return value

    @field_validator("scales")
    @classmethod
    def _unique_internal_scales(cls, value: List[ScaleTag]) -> List[ScaleTag]:
        if ScaleTag.EXEMPLAR in value:
            raise ValueError("scales may only contain full, half and quarter")
        # Canonical order keeps parameter layouts stable across spellings.
        return [tag for tag in (ScaleTag.FULL, ScaleTag.HALF, ScaleTag.QUARTER) if tag in value]

    @model_validator(mode="after")
    def _patches_cover_the_map(self) -> "MsgnnConfig":
        # Wider strides leave pixels that no patch covers.
        if self.stride > self.patch_size:
            raise ValueError(f"stride s={self.stride} must not exceed patch size l={self.patch_size}")
        return self

    @property
    def graph_branches(self) -> List[ScaleTag]:
        """Graph outputs fed to the injection blocks, in a fixed order."""
        if not self.use_graph:
            return []
        branches = list(self.scales)
        if self.use_exemplar:
            branches.append(ScaleTag.EXEMPLAR)
        return branches

    @property
    def gate_hidden(self) -> int:
        """Hidden width of the channel gate."""
        reduction = 16 if self.attention_variant == AttentionVariant.SE else 8
        return max(1, self.channels // reduction)
