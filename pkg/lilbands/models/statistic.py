import math

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

from lilbands.models.enums import StatisticFamily


class PenaltySpec(BaseModel):
    """Weight nu of the D(t) term; the convergence results need nu > 1"""

    model_config = ConfigDict(frozen=True)

    nu: float = Field(default=1.1, gt=1.0)


class GridPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    j: int = Field(..., ge=0)

    @field_validator("j")
    @classmethod
    def _j_in_range(cls, v: int, info: ValidationInfo) -> int:
        n = info.data.get("n")
        if n is not None and v > n:
            raise ValueError(f"j={v} exceeds n={n}")
        return v

    @property
    def t_nj(self) -> float:
        """j / (n + 1)"""
        return self.j / (self.n + 1)

    @property
    def s_nj(self) -> float:
        """j / n"""
        return self.j / self.n


class StatisticResult(BaseModel):
    """Value of a test statistic with the location of its extremum"""

    model_config = ConfigDict(frozen=True)

    value: float
    argmax_location: float = Field(..., gt=0.0, lt=1.0, description="t in (0, 1) achieving the extremum")
    argmax_index: int = Field(..., ge=0, description="Order statistic index, 0 for the t = 1/2 term")
    family: StatisticFamily

    @field_validator("value")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("statistic value must be finite")
        return v
