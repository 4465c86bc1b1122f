import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lilbands.models.enums import TailProcess
from lilbands.models.quantile_table import QuantileTable


class BridgePath(BaseModel):
    """Brownian bridge values on a logit-equispaced grid"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: np.ndarray
    values: np.ndarray

    @model_validator(mode="after")
    def _check_path(self) -> "BridgePath":
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.grid) <= 0.0) or self.grid[0] <= 0.0 or self.grid[-1] >= 1.0:
            raise ValueError("grid must be strictly increasing inside (0, 1)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("path values must be finite")
        return self


class TailBoundParams(BaseModel):
    """
    Window [l(a), l(a + c)] and thresholds eta of the sub-exponential bound
    P(sup X >= eta) <= M exp(-L(c) eta), with L(c) = exp(-c).
    """

    model_config = ConfigDict(frozen=True)

    m_const: float = Field(default=2.0, ge=1.0)
    a: float = 0.0
    c: float = Field(default=1.0, ge=0.0)
    eta: List[float] = Field(default_factory=lambda: [2.0, 4.0, 6.0])
    # fitted constants of the exponential tail of T_nu, when known
    m_o: Optional[float] = None
    l_o: Optional[float] = None

    @model_validator(mode="after")
    def _check_eta(self) -> "TailBoundParams":
        if not self.eta or any(e < 0.0 or not math.isfinite(e) for e in self.eta):
            raise ValueError("eta must be a nonempty grid of finite nonnegative thresholds")
        return self

    @property
    def l_fn_at_c(self) -> float:
        return math.exp(-self.c)

    def bound(self, eta: float) -> float:
        return self.m_const * math.exp(-self.l_fn_at_c * eta)


class TailCheckRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta: float
    exceedances: int
    frequency: float
    ucl: float = Field(..., description="One-sided 99% Clopper-Pearson upper limit")
    bound: float
    passed: bool


class TailCheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    process: TailProcess
    params: TailBoundParams
    reps: int
    n: Optional[int] = Field(default=None, description="Sample size for the empirical-process variants")
    rows: List[TailCheckRow]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)


class ExponentialTailFit(BaseModel):
    """log P(T > eta) ~ log M_o - L_o eta"""

    model_config = ConfigDict(frozen=True)

    m_o: float
    l_o: float
    eta_lo: float
    eta_hi: float


class LimitReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    table: QuantileTable
    kappa_2m: float
    std_err_2m: float
    sensitivity: float = Field(..., description="kappa at 2m minus kappa at m")
