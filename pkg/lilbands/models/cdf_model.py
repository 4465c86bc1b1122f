import math
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import special

from lilbands.core import special_functions as spf
from lilbands.exceptions import ModelSpecError
from lilbands.models.enums import CdfKind
from lilbands.models.sample import RngKey, SortedSample


class CdfModel(BaseModel):
    """
    Hypothesized continuous distribution function F_o.

    GAUSS_MIXTURE is (1 - eps) Phi(x) + eps Phi(x - mu); eps = 0 is the
    standard normal. TABULATED interpolates linearly between knots
    (knots_x strictly increasing, knots_p nondecreasing) and refuses to
    evaluate outside [knots_x[0], knots_x[-1]].
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: CdfKind
    eps: float = Field(default=0.0, ge=0.0, lt=1.0)
    mu: float = 0.0
    knots_x: Optional[np.ndarray] = None
    knots_p: Optional[np.ndarray] = None
    spec: str = Field(default="", description="Spec string the model was parsed from")

    @model_validator(mode="after")
    def _check_knots(self) -> "CdfModel":
        if self.kind is not CdfKind.TABULATED:
            return self
        if self.knots_x is None or self.knots_p is None:
            raise ValueError("tabulated model needs knots")
        if self.knots_x.shape != self.knots_p.shape or self.knots_x.size < 2:
            raise ValueError("tabulated model needs at least two (x, p) knots")
        if np.any(np.diff(self.knots_x) <= 0.0):
            raise ValueError("knot x values must be strictly increasing")
        if np.any(np.diff(self.knots_p) < 0.0) or self.knots_p[0] < 0.0 or self.knots_p[-1] > 1.0:
            raise ValueError("knot probabilities must be nondecreasing in [0, 1]")
        return self

    @classmethod
    def std_normal(cls) -> "CdfModel":
        return cls(kind=CdfKind.STD_NORMAL, spec="normal")

    @classmethod
    def uniform(cls) -> "CdfModel":
        return cls(kind=CdfKind.UNIFORM01, spec="uniform")

    @classmethod
    def mixture(cls, eps: float, mu: float) -> "CdfModel":
        return cls(kind=CdfKind.GAUSS_MIXTURE, eps=eps, mu=mu, spec=f"mixture:{eps!r}:{mu!r}")

    @classmethod
    def tabulated(cls, knots_x: Any, knots_p: Any, spec: str = "table") -> "CdfModel":
        return cls(
            kind=CdfKind.TABULATED,
            knots_x=np.asarray(knots_x, dtype=float),
            knots_p=np.asarray(knots_p, dtype=float),
            spec=spec,
        )

    @property
    def is_mixture(self) -> bool:
        return self.kind is CdfKind.GAUSS_MIXTURE and self.eps > 0.0

    # --- evaluation ---

    def _check_range(self, x: np.ndarray) -> None:
        assert self.knots_x is not None
        outside = (x < self.knots_x[0]) | (x > self.knots_x[-1]) | np.isnan(x)
        if np.any(outside):
            bad = float(np.asarray(x)[outside].ravel()[0])
            raise ModelSpecError(
                f"x={bad!r} outside tabulated range [{self.knots_x[0]!r}, {self.knots_x[-1]!r}]"
            )

    def cdf(self, x: Any) -> Any:
        x_arr = np.asarray(x, dtype=float)
        if self.kind is CdfKind.STD_NORMAL:
            value = spf.std_normal_cdf(x_arr)
        elif self.kind is CdfKind.UNIFORM01:
            value = np.clip(x_arr, 0.0, 1.0)
        elif self.kind is CdfKind.GAUSS_MIXTURE:
            value = (1.0 - self.eps) * spf.std_normal_cdf(x_arr) + self.eps * spf.std_normal_cdf(x_arr - self.mu)
        else:
            self._check_range(x_arr)
            value = np.interp(x_arr, self.knots_x, self.knots_p)
        return float(value) if np.ndim(value) == 0 else np.asarray(value)

    def sf(self, x: Any) -> Any:
        """Survival function 1 - F(x), accurate in the upper tail"""
        x_arr = np.asarray(x, dtype=float)
        if self.kind is CdfKind.STD_NORMAL:
            value = spf.std_normal_sf(x_arr)
        elif self.kind is CdfKind.GAUSS_MIXTURE:
            value = (1.0 - self.eps) * spf.std_normal_sf(x_arr) + self.eps * spf.std_normal_sf(x_arr - self.mu)
        else:
            value = 1.0 - np.asarray(self.cdf(x_arr))
        return float(value) if np.ndim(value) == 0 else np.asarray(value)

    def logcdf(self, x: Any) -> np.ndarray:
        x_arr = np.asarray(x, dtype=float)
        if self.kind is CdfKind.STD_NORMAL:
            return special.log_ndtr(x_arr)
        if self.kind is CdfKind.GAUSS_MIXTURE:
            if self.eps == 0.0:
                return special.log_ndtr(x_arr)
            return np.logaddexp(
                math.log1p(-self.eps) + special.log_ndtr(x_arr),
                math.log(self.eps) + special.log_ndtr(x_arr - self.mu),
            )
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.cdf(x_arr), dtype=float))

    def logsf(self, x: Any) -> np.ndarray:
        x_arr = np.asarray(x, dtype=float)
        if self.kind is CdfKind.STD_NORMAL:
            return special.log_ndtr(-x_arr)
        if self.kind is CdfKind.GAUSS_MIXTURE:
            if self.eps == 0.0:
                return special.log_ndtr(-x_arr)
            return np.logaddexp(
                math.log1p(-self.eps) + special.log_ndtr(-x_arr),
                math.log(self.eps) + special.log_ndtr(self.mu - x_arr),
            )
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.sf(x_arr), dtype=float))

    def quantile(self, p: Any) -> Any:
        """Generalized inverse inf{x : F(x) >= p}"""
        p_arr = np.asarray(p, dtype=float)
        if np.any((p_arr < 0.0) | (p_arr > 1.0) | np.isnan(p_arr)):
            raise ModelSpecError("quantile probabilities must lie in [0, 1]")
        if self.kind is CdfKind.STD_NORMAL or (self.kind is CdfKind.GAUSS_MIXTURE and self.eps == 0.0):
            value = special.ndtri(p_arr)
        elif self.kind is CdfKind.UNIFORM01:
            value = p_arr.copy()
        elif self.kind is CdfKind.GAUSS_MIXTURE:
            value = self._mixture_quantile(p_arr)
        else:
            value = self._table_quantile(p_arr)
        return float(value) if np.ndim(value) == 0 else np.asarray(value)

    def _mixture_quantile(self, p: np.ndarray) -> np.ndarray:
        # Phi(x - |mu|) <= F(x) <= Phi(x + |mu|) brackets the root
        flat = p.ravel()
        result = np.where(flat >= 1.0, np.inf, -np.inf)
        inner = (flat > 0.0) & (flat < 1.0)
        if inner.any():
            pi = flat[inner]
            base = special.ndtri(pi)
            lo = base + min(self.mu, 0.0) - 1e-9
            hi = base + max(self.mu, 0.0) + 1e-9
            root = np.empty_like(pi)
            low_half = pi <= 0.5
            if low_half.any():
                p_low = pi[low_half]
                root[low_half] = spf.bisect_increasing(
                    lambda x, idx: np.asarray(self.cdf(x)), p_low, lo[low_half], hi[low_half], ftol=1e-12 * p_low
                )
            if (~low_half).any():
                q = 1.0 - pi[~low_half]
                root[~low_half] = spf.bisect_increasing(
                    lambda x, idx: -np.asarray(self.sf(x)), -q, lo[~low_half], hi[~low_half], ftol=1e-12 * q
                )
            result[inner] = root
        return result.reshape(p.shape)

    def _table_quantile(self, p: np.ndarray) -> np.ndarray:
        assert self.knots_x is not None and self.knots_p is not None
        xs, ps = self.knots_x, self.knots_p
        if np.any((p < ps[0]) | (p > ps[-1])):
            raise ModelSpecError(f"probability outside tabulated range [{ps[0]!r}, {ps[-1]!r}]")
        k = np.searchsorted(ps, p, side="left")
        k_prev = np.maximum(k - 1, 0)
        denom = ps[k] - ps[k_prev]
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(denom > 0.0, (p - ps[k_prev]) / denom, 0.0)
        value = xs[k_prev] + frac * (xs[k] - xs[k_prev])
        return np.where(k == 0, xs[0], value)

    # --- sampling ---

    def sample(self, n: int, key: RngKey) -> SortedSample:
        """Sorted draw of size n; see lilbands.core.sampling.gen_sample"""
        from lilbands.core.sampling import gen_sample

        return gen_sample(n, key, self)
