import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from lilbands.models.cdf_model import CdfModel


class SparseMixtureParams(BaseModel):
    """
    Gaussian location mixture (1 - eps) Phi(x) + eps Phi(x - mu) at sample size n.

    calibration is "dense" (eps = n^-beta, mu = sqrt(2 r log n)), "sparse"
    (eps = n^-beta, pi_n = sqrt(n) eps, mu = sqrt(2 s_exp log(1/pi_n))) or
    "explicit" (eps and mu given).
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    calibration: str = Field(default="explicit", pattern="^(dense|sparse|explicit)$")
    beta: Optional[float] = Field(default=None, ge=0.5, lt=1.0)
    r: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    s_exp: Optional[float] = Field(default=None, gt=0.0)
    eps: float = Field(..., ge=0.0, lt=1.0)
    mu: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def _check_calibration(self) -> "SparseMixtureParams":
        if self.calibration == "dense" and (self.beta is None or self.r is None):
            raise ValueError("dense calibration needs beta and r")
        if self.calibration == "sparse" and (self.beta is None or self.s_exp is None):
            raise ValueError("sparse calibration needs beta and s_exp")
        return self

    @property
    def pi_n(self) -> float:
        """sqrt(n) * eps"""
        return math.sqrt(self.n) * self.eps

    @property
    def model(self) -> CdfModel:
        return CdfModel.mixture(self.eps, self.mu)


class DeltaResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float = Field(..., ge=0.0)
    argmax_x: float


class LlrSummary(BaseModel):
    """Null distribution summary of sum_i log(1 + V_n(X_i)) for X_i ~ Phi"""

    model_config = ConfigDict(frozen=True)

    reps: int
    mean: float
    variance: float
    exceed_fraction: float = Field(..., ge=0.0, le=1.0, description="Fraction of |LLR| > 0.1")
    second_moment_bound: float = Field(..., description="pi_n^{2(1-s)} - pi_n^2")
    var_v_theory: float = Field(..., description="pi_n^2 (exp(mu^2) - 1), variance of sum_i V_n(X_i)")
    var_v_empirical: float
    var_v_std_err: float
    concentration_guaranteed: bool = Field(..., description="False when s_exp >= 1")


class PowerRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    eps: float
    mu: float
    delta_n: float
    rejection_rate: float
    se: float
    s_exp: Optional[float] = None


class NonRejectionPoint(BaseModel):
    """One point of the non-rejection frequency against Delta_n curve"""

    model_config = ConfigDict(frozen=True)

    n: int
    eps: float
    mu: float
    delta_n: float
    nonrejection: float
    std_err: float
