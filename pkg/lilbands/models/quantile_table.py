import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from lilbands.models.enums import StatisticFamily


def format_key_number(value: float) -> str:
    """Shortest round-trip form used in cache file names"""
    return repr(float(value)) if not float(value).is_integer() else str(int(value))


class QuantileTable(BaseModel):
    """Monte-Carlo critical value kappa for one (family, n, nu, alpha, reps, seed) key"""

    model_config = ConfigDict(frozen=True)

    family: StatisticFamily
    n: int = Field(..., ge=1)
    nu: float = Field(default=0.0, ge=0.0, description="0 for families without a nu parameter")
    alpha: float = Field(..., gt=0.0, lt=1.0)
    reps: int = Field(..., ge=1)
    seed: int = Field(..., ge=0, lt=2**64)
    kappa: float
    std_err: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_kappa(self) -> "QuantileTable":
        if not math.isfinite(self.kappa):
            raise ValueError("kappa must be finite")
        if self.family is StatisticFamily.UNION_INTERSECTION and not 0.0 < self.kappa < 1.0:
            raise ValueError("union-intersection kappa is a p-value quantile in (0, 1)")
        return self

    @property
    def key(self) -> Tuple[str, int, float, float]:
        return (self.family.value, self.n, self.nu, self.alpha)

    def matches(self, family: StatisticFamily, n: int, nu: float, alpha: float) -> bool:
        """Same (family, n, nu, alpha); nu is compared only for families that use it"""
        if self.family is not family or self.n != n or not math.isclose(self.alpha, alpha, rel_tol=1e-12):
            return False
        return not family.uses_nu or math.isclose(self.nu, nu, rel_tol=1e-12)


def table_file_name(
    family: StatisticFamily, n: int, nu: float, alpha: float, reps: Optional[int] = None, seed: Optional[int] = None
) -> str:
    stem = f"{family.value}_n{n}_nu{format_key_number(nu)}_a{format_key_number(alpha)}"
    if reps is not None:
        stem += f"_r{reps}_s{seed}"
    return stem + ".json"
