import math

from pydantic import BaseModel, ConfigDict, Field, field_validator


class ParticleSystem(BaseModel):
    """Finite configuration of the frozen multiplicative coalescent."""

    model_config = ConfigDict(frozen=False)

    standard: list[float]
    frozen: list[float]
    time: float = 0.0
    p: float = Field(ge=0.0, le=1.0)

    @field_validator("standard", "frozen")
    @classmethod
    def _positive_masses(cls, masses: list[float]) -> list[float]:
        for mass in masses:
            if not (math.isfinite(mass) and mass > 0):
                raise ValueError(f"particle masses must be positive and finite, got {mass}")
        return masses

    def total_mass(self) -> float:
        return math.fsum(self.standard) + math.fsum(self.frozen)

    def frozen_mass(self) -> float:
        return math.fsum(self.frozen)

    def is_absorbing(self) -> bool:
        return not self.standard
