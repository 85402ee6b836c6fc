from pydantic import BaseModel, ConfigDict, Field


class ScaledAiryPair(BaseModel):
    """Airy values scaled by exp((2/3) z^{3/2}) so neither under- nor overflows."""

    model_config = ConfigDict(frozen=True)

    z: float = Field(ge=0.0)
    ai_s: float  # Ai(z) exp(2/3 z^{3/2})
    aip_s: float  # Ai'(z) exp(2/3 z^{3/2})


class LogDensityValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    log_p1: float


class KernelIntegrals(BaseModel):
    """I1, I2, I3 and I1 restricted to jumps below -x_max, at state x >= 0."""

    model_config = ConfigDict(frozen=True)

    x: float = Field(ge=0.0)
    i1: float = Field(ge=0.0)
    i2: float = Field(ge=0.0)
    i3: float = Field(ge=0.0)
    i1_trunc: float = Field(ge=0.0)
    abs_tol: float = Field(ge=0.0)  # summed error estimate reported by the quadrature


class XMax(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_max: float
    p1_at_max: float = Field(gt=0.0)


class LevyExponentCheck(BaseModel):
    """Laplace constant of the Levy measure, by quadrature and in closed form."""

    model_config = ConfigDict(frozen=True)

    numeric: float
    closed_form: float
    characteristic_real: float  # Psi(1), should equal k cos(-3 pi / 4)
    characteristic_imag: float  # should equal k sin(-3 pi / 4)
    relative_mismatch: float
    consistent: bool
