from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.frozen_er.constants import (
    DEFAULT_DELTA_POSITIVE_P,
    DEFAULT_DELTA_ZERO_P,
    THINNING_SAFETY,
    THINNING_WINDOW,
)


class LimitConfig(BaseModel):
    """Parameters of one path of X_p started at X(t0) = x0.

    `delta` and `compensate_small` default by p: 1e-4 with drift compensation
    when p > 0, 1e-8 without it when p = 0.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    p: float = Field(ge=0.0, le=1.0)
    t0: float = 0.0
    x0: float = Field(ge=0.0, default=0.0)
    t_end: float
    delta: float = Field(gt=0.0)
    compensate_small: bool
    seed: int = Field(ge=0, le=2**64 - 1, default=0)
    safety: float = Field(ge=1.0, default=THINNING_SAFETY)
    max_window: float = Field(gt=0.0, default=THINNING_WINDOW)

    @model_validator(mode="before")
    @classmethod
    def _p_dependent_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        positive_p = float(data.get("p", 0.0)) > 0
        if data.get("delta") is None:
            data["delta"] = DEFAULT_DELTA_POSITIVE_P if positive_p else DEFAULT_DELTA_ZERO_P
        if data.get("compensate_small") is None:
            data["compensate_small"] = positive_p
        return data

    @model_validator(mode="after")
    def _check_horizon(self) -> "LimitConfig":
        if not self.t_end > self.t0:
            raise ValueError(f"t_end ({self.t_end}) must exceed t0 ({self.t0})")
        return self


class JumpEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: float
    y: float = Field(gt=0.0)


class DriftSegment(BaseModel):
    """X grows linearly at `rate` on [start, end) to account for jumps below delta."""

    model_config = ConfigDict(frozen=True)

    start: float
    end: float
    rate: float = Field(ge=0.0)


class LimitPath(BaseModel):
    model_config = ConfigDict(frozen=False)

    config: LimitConfig
    events: list[JumpEvent] = Field(default_factory=list)
    drift_segments: list[DriftSegment] = Field(default_factory=list)

    def _drift_until(self, t: float) -> float:
        if not self.drift_segments:
            return 0.0
        starts = np.array([seg.start for seg in self.drift_segments])
        ends = np.array([seg.end for seg in self.drift_segments])
        rates = np.array([seg.rate for seg in self.drift_segments])
        covered = np.clip(np.minimum(ends, t) - starts, 0.0, None)
        return float(np.sum(rates * covered))

    def value_at(self, t: float) -> float:
        """X(t), right-continuous: a jump at s = t is included."""
        jumps = sum(event.y for event in self.events if event.s <= t)
        return self.config.x0 + jumps + self._drift_until(t)

    def value_before(self, t: float) -> float:
        """Left limit X(t-)."""
        jumps = sum(event.y for event in self.events if event.s < t)
        return self.config.x0 + jumps + self._drift_until(t)

    def jump_count(self, t: float | None = None) -> int:
        if t is None:
            return len(self.events)
        return sum(1 for event in self.events if event.s <= t)


class PathDiagnostics(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float
    value: float  # X(t)
    compensator: float  # X^pre(t)
    martingale: float  # X(t) - X^pre(t)
    quadratic_variation: float = Field(ge=0.0)


class LyapunovVerdict(BaseModel):
    """One grid point of the drift check.

    V(x) overflows for |x| beyond ~20 at the usual alpha, so the check is carried by
    `drift_ratio` = AV(x)/V(x); `generator_value` is AV(x) where it is finite.
    """

    model_config = ConfigDict(frozen=True)

    x: float
    log_v: float
    drift_ratio: float
    generator_value: float | None
    inside: bool
    holds: bool


class LyapunovReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0.0, lt=1.0 / 6.0)
    beta: float = Field(gt=0.0)
    delta_exp: float = Field(gt=0.0)  # (beta / alpha)^{1/3}
    B: float = Field(gt=0.0)
    a: float = Field(gt=0.0)
    b: float = Field(ge=0.0)
    verdicts: list[LyapunovVerdict]
    violations: list[float]  # grid points outside [-B/delta_exp, B] with AV > -aV

    @property
    def holds(self) -> bool:
        return not self.violations
