from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class GofReport(BaseModel):
    """Outcome of a goodness-of-fit test of one sample against a hypothesized F_o"""

    model_config = ConfigDict(frozen=True)

    statistic: float
    kappa: float
    p_value: float = Field(..., ge=0.0, le=1.0)
    reject: bool
    argmax_x: float
    n: int = Field(..., ge=1)
    nu: float
    alpha: float
    reps: int = Field(..., ge=1, description="Replicates behind the p-value")
    seed: int
    model: str = Field(default="", description="CDF model spec string")
    ties_present: bool = False
    # diagnostics
    surrogate_min_pvalue: Optional[float] = None
    ui_statistic: Optional[float] = None

    @model_validator(mode="after")
    def _check_decision(self) -> "GofReport":
        if self.reject != (self.statistic > self.kappa):
            raise ValueError("reject must equal statistic > kappa")
        return self


class RateEstimate(BaseModel):
    """Monte-Carlo frequency with its binomial standard error"""

    model_config = ConfigDict(frozen=True)

    rate: float = Field(..., ge=0.0, le=1.0)
    std_err: float = Field(..., ge=0.0)
    reps: int = Field(..., ge=1)
