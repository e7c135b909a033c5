"""Rain synthesis parameters."""

from pydantic import BaseModel, ConfigDict, Field


class RainParams(BaseModel):
    """Parameters of one additive rain-streak layer."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    density: float = Field(0.02, gt=0, le=0.2, description="Fraction of seed pixels")
    angle_deg: float = Field(10.0, ge=-45, le=45, description="Streak angle from vertical")
    length_px: int = Field(9, ge=3, le=31, description="Streak length in pixels")
    intensity: float = Field(0.8, gt=0, le=1, description="Peak streak value")
    seed: int = Field(7, ge=0, lt=2**64, description="Random seed")

    def manifest_line(self, name: str) -> str:
        """Tab-separated manifest record for this layer."""
        return (
            f"{name}\t{self.density}\t{self.angle_deg}\t{self.length_px}"
            f"\t{self.intensity}\t{self.seed}"
        )
