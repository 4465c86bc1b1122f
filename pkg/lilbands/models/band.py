from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lilbands.models.enums import BandMethod

_SLACK = 1e-12


class ConfidenceBand(BaseModel):
    """
    Simultaneous limits [a_{nj}, b_{nj}], j = 0..n, for F(x) on X_{n:j} <= x < X_{n:j+1}.

    lower and upper are float arrays of length n + 1; saturated marks upper
    limits that had to be clamped to 1 - ulp.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    method: BandMethod
    lower: np.ndarray
    upper: np.ndarray
    kappa_used: float
    nu: Optional[float] = Field(default=None, description="Penalty weight, NEW bands only")
    alpha: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    saturated: int = Field(default=0, ge=0, description="Number of clamped limits")

    @model_validator(mode="after")
    def _check_structure(self) -> "ConfidenceBand":
        size = self.n + 1
        if self.lower.shape != (size,) or self.upper.shape != (size,):
            raise ValueError(f"band arrays must have length n + 1 = {size}")
        if self.lower[0] != 0.0 or self.upper[-1] != 1.0:
            raise ValueError("band must satisfy a_{n0} = 0 and b_{nn} = 1")
        grid = self.s_nj
        if np.any(self.lower < 0.0) or np.any(self.upper > 1.0):
            raise ValueError("band limits must lie in [0, 1]")
        if np.any(self.lower > grid + _SLACK) or np.any(self.upper < grid - _SLACK):
            raise ValueError("band must contain s_{nj} = j/n at every index")
        if np.any(np.diff(self.lower) < 0.0) or np.any(np.diff(self.upper) < 0.0):
            raise ValueError("band limits must be nondecreasing in j")
        return self

    @property
    def s_nj(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    @property
    def centered_lower(self) -> np.ndarray:
        return self.lower - self.s_nj

    @property
    def centered_upper(self) -> np.ndarray:
        return self.upper - self.s_nj


class BandBudget(BaseModel):
    """Divergence budget gamma at grid point t"""

    model_config = ConfigDict(frozen=True)

    t: float = Field(..., gt=0.0, lt=1.0)
    gamma: float = Field(..., ge=0.0)


class BandComparison(BaseModel):
    """Efficiency diagnostics of band 1 against band 2 over the same n"""

    model_config = ConfigDict(frozen=True)

    n: int
    max_upper_ratio: Optional[float] = Field(None, description="max_j (b1 - s) / (b2 - s)")
    max_lower_ratio: Optional[float] = Field(None, description="max_j (s - a1) / (s - a2)")
    small_j_upper_ratio: Optional[float] = Field(None, description="max over j <= 10 of the upper ratio")
    max_half_width_1: float
    max_half_width_2: float
    lil_scale: Optional[float] = Field(None, description="sqrt(log log n / (2n)), defined for n >= 3")
    root_n_scale: float


class CoverageResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    coverage: float = Field(..., ge=0.0, le=1.0)
    std_err: float = Field(..., ge=0.0)
    reps: int = Field(..., ge=1)
