from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lilbands.core.config import settings
from lilbands.models.enums import BandMethod, OutputFormat, StatisticFamily


class RunConfig(BaseModel):
    """Validated command-line values; flags override settings"""

    model_config = ConfigDict(frozen=True)

    subcommand: str = Field(..., pattern="^(quantile|band|gof|power|limit)$")
    n: Optional[int] = Field(default=None, ge=1, description="Sample size")
    nu: float = Field(default_factory=lambda: settings.DEFAULT_NU, gt=1.0)
    alpha: float = Field(default_factory=lambda: settings.DEFAULT_ALPHA, gt=0.0, lt=1.0)
    reps: int = Field(default_factory=lambda: settings.DEFAULT_REPS, ge=100)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=2**63)
    threads: int = Field(default_factory=lambda: settings.DEFAULT_THREADS, ge=1)
    cache_dir: Path = Field(default_factory=lambda: settings.cache_path)
    out: Optional[Path] = None
    format: Optional[OutputFormat] = Field(default=None, description="None picks the subcommand's default")
    verbose: bool = False

    # quantile
    family: StatisticFamily = StatisticFamily.NEW_SUP
    # band
    method: BandMethod = BandMethod.NEW
    centered: bool = False
    # gof
    input: Optional[Path] = None
    column: Optional[str] = None
    cdf: str = "normal"
    pvalue_reps: int = Field(default_factory=lambda: settings.DEFAULT_PVALUE_REPS, ge=1)
    # power
    beta: Optional[float] = Field(default=None, gt=0.5, lt=1.0)
    r: Optional[float] = Field(default=None, gt=0.0)
    eps: Optional[float] = Field(default=None, ge=0.0, lt=1.0)
    mu: Optional[float] = None
    sparse_s: List[float] = Field(default_factory=list)
    n_grid: List[int] = Field(default_factory=lambda: [100, 500, 2000])
    power_reps: int = Field(default=500, ge=1)
    # limit
    m: int = Field(default_factory=lambda: settings.DEFAULT_LIMIT_GRID, ge=3)
    tail_check: bool = False

    @field_validator("n_grid")
    @classmethod
    def _check_n_grid(cls, value: List[int]) -> List[int]:
        if not value or any(n < 2 for n in value):
            raise ValueError("n-grid needs sample sizes >= 2")
        return value

    @field_validator("sparse_s")
    @classmethod
    def _check_sparse_s(cls, value: List[float]) -> List[float]:
        if any(s <= 0.0 for s in value):
            raise ValueError("sparse-s exponents must be positive")
        return value

    @model_validator(mode="after")
    def _check_subcommand(self) -> "RunConfig":
        if self.subcommand in ("quantile", "band") and self.n is None:
            raise ValueError(f"{self.subcommand} needs --n")
        if self.subcommand == "gof" and self.input is None:
            raise ValueError("gof needs --input")
        if self.subcommand == "power":
            explicit = self.eps is not None
            if explicit and (self.beta is not None or self.r is not None or self.sparse_s):
                raise ValueError("use either --eps/--mu or --beta with --r/--sparse-s")
            if not explicit and self.beta is None:
                raise ValueError("power needs --beta (with --r or --sparse-s) or --eps")
            if self.r is not None and self.sparse_s:
                raise ValueError("--r and --sparse-s are exclusive")
        return self

    def output_format(self, default: OutputFormat = OutputFormat.CSV) -> OutputFormat:
        return self.format or default
