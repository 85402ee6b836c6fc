from pydantic import BaseModel, ConfigDict, Field

from src.frozen_er.enums import ExperimentName


class ResultRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    replica: int = Field(ge=0)
    time: float
    observable: str
    value: float


class Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""


class ExperimentResult(BaseModel):
    """Rows and verdicts of one experiment run.

    `config_echo` is the canonical JSON (sorted keys, compact separators) of the
    validated config, seed included.
    """

    model_config = ConfigDict(frozen=False)

    name: ExperimentName
    seed: int = Field(ge=0, le=2**64 - 1)
    config_echo: str
    rows: list[ResultRow] = Field(default_factory=list)
    verdicts: list[Verdict] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)
