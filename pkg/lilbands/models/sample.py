from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from lilbands.exceptions import SampleValidationError

_UINT64_LIMIT = 2**64


class RngKey(BaseModel):
    """(seed, stream_index) address of one reproducible random stream"""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(..., ge=0, lt=_UINT64_LIMIT)
    stream_index: int = Field(default=0, ge=0, lt=_UINT64_LIMIT, description="Replicate number")

    def generator(self) -> np.random.Generator:
        """Counter-based Philox stream keyed by both words, independent of any other key"""
        key = np.array([self.seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


class UniformOrderStats(BaseModel):
    """
    Sorted values U_{n:1} <= ... <= U_{n:n} in (0, 1).

    `complements` optionally holds 1 - U_{n:i} computed from the upper tail
    (a survival function), which keeps points near 1 distinguishable after
    U_{n:i} itself has rounded to 1 - ulp.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    values: np.ndarray
    complements: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def _check_values(self) -> "UniformOrderStats":
        if self.values.shape != (self.n,):
            raise ValueError(f"expected {self.n} values, got shape {self.values.shape}")
        if self.complements is not None and self.complements.shape != (self.n,):
            raise ValueError(f"expected {self.n} complements, got shape {self.complements.shape}")
        return self

    @property
    def upper_tail(self) -> np.ndarray:
        """1 - U_{n:i}, from `complements` when present"""
        return self.complements if self.complements is not None else 1.0 - self.values

    @classmethod
    def from_values(cls, values: Any) -> "UniformOrderStats":
        """Validate (not sort) values as uniform order statistics"""
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size == 0:
            raise SampleValidationError("order statistics need at least one value")
        if not np.all(np.isfinite(arr)):
            raise SampleValidationError("order statistics must be finite")
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise SampleValidationError("order statistics must lie strictly inside (0, 1)")
        if np.any(np.diff(arr) < 0.0):
            raise SampleValidationError("order statistics must be sorted ascending")
        return cls(n=arr.size, values=arr)


class SortedSample(BaseModel):
    """Ordered data values X_{n:1} <= ... <= X_{n:n}"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    values: np.ndarray
    ties_present: bool = False

    @model_validator(mode="after")
    def _check_values(self) -> "SortedSample":
        if self.values.shape != (self.n,):
            raise ValueError(f"expected {self.n} values, got shape {self.values.shape}")
        if np.any(np.diff(self.values) < 0.0):
            raise ValueError("values must be sorted ascending")
        return self

    @classmethod
    def from_values(cls, values: Any) -> "SortedSample":
        arr = np.sort(np.asarray(values, dtype=float).ravel())
        if arr.size == 0:
            raise SampleValidationError("sample is empty")
        if not np.all(np.isfinite(arr)):
            raise SampleValidationError("sample contains non-finite values")
        return cls(n=arr.size, values=arr, ties_present=bool(np.any(np.diff(arr) == 0.0)))
