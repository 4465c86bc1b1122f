import math

from pydantic import BaseModel, ConfigDict, Field, model_validator


class PenaltyValue(BaseModel):
    """Values of the LIL penalties C(t), D(t) and Gamma(t) = C(t) + 1 at one point"""

    model_config = ConfigDict(frozen=True)

    c_val: float = Field(..., ge=0, description="C(t) = log log(e / (4t(1-t)))")
    d_val: float = Field(..., ge=0, description="D(t) = log(1 + C(t)^2)")
    gamma_cap: float = Field(..., ge=1, description="Gamma(t) = C(t) + 1, +inf at t in {0, 1}")

    @model_validator(mode="after")
    def _check_relations(self) -> "PenaltyValue":
        if math.isfinite(self.c_val):
            if not math.isclose(self.d_val, math.log1p(self.c_val**2), rel_tol=1e-12, abs_tol=1e-15):
                raise ValueError("d_val must equal log(1 + c_val^2)")
            if not math.isclose(self.gamma_cap, self.c_val + 1.0, rel_tol=1e-12):
                raise ValueError("gamma_cap must equal c_val + 1")
        return self


class BetaParams(BaseModel):
    """Shape parameters of a beta distribution, e.g. Beta(i, n + 1 - i) for U_{n:i}"""

    model_config = ConfigDict(frozen=True)

    shape_a: float = Field(..., gt=0)
    shape_b: float = Field(..., gt=0)

    @classmethod
    def order_statistic(cls, n: int, i: int) -> "BetaParams":
        """Law of the i-th of n uniform order statistics"""
        return cls(shape_a=i, shape_b=n + 1 - i)

    @classmethod
    def from_mean_and_size(cls, t: float, m: float) -> "BetaParams":
        """Beta(mt, m(1-t)): mean t, 'sample size' m"""
        return cls(shape_a=m * t, shape_b=m * (1.0 - t))
