"""
Parser for the CDF model grammar: normal | uniform | mixture:<eps>:<mu> | table:<path>
"""

import math
from pathlib import Path
from typing import Tuple

import numpy as np

from lilbands.exceptions import DataInputError, ModelSpecError
from lilbands.models.cdf_model import CdfModel
from lilbands.utils.io_utils import read_data_file


def _number(token: str, name: str, spec: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ModelSpecError(f"{spec!r}: {name} {token!r} is not a number") from None
    if not math.isfinite(value):
        raise ModelSpecError(f"{spec!r}: {name} must be finite")
    return value


def read_knots(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    """Knot columns `x` and `p` of a CSV file with a header row"""
    try:
        knots_x = read_data_file(path, column="x")
        knots_p = read_data_file(path, column="p")
    except DataInputError as e:
        raise ModelSpecError(f"table {path}: {e.message}") from None
    return knots_x, knots_p


def parse_model_spec(spec: str) -> CdfModel:
    text = spec.strip()
    kind, _, rest = text.partition(":")

    if kind in ("normal", "uniform") and rest == "":
        return CdfModel.std_normal() if kind == "normal" else CdfModel.uniform()

    if kind == "mixture":
        parts = rest.split(":")
        if len(parts) != 2:
            raise ModelSpecError(f"{spec!r}: expected mixture:<eps>:<mu>")
        eps = _number(parts[0], "eps", spec)
        mu = _number(parts[1], "mu", spec)
        if not 0.0 <= eps < 1.0:
            raise ModelSpecError(f"{spec!r}: eps must lie in [0, 1)")
        if eps == 0.0:
            return CdfModel.std_normal()
        return CdfModel.mixture(eps, mu)

    if kind == "table" and rest:
        path = Path(rest)
        knots_x, knots_p = read_knots(path)
        try:
            return CdfModel.tabulated(knots_x, knots_p, spec=text)
        except ValueError as e:
            raise ModelSpecError(f"table {path}: {e}") from None

    raise ModelSpecError(f"{spec!r}: expected normal, uniform, mixture:<eps>:<mu> or table:<path>")
