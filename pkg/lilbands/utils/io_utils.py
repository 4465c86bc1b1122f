"""
Input/output helpers: number formatting, data files, CSV rows and atomic writes
"""

import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Union

import numpy as np

from lilbands.exceptions import DataInputError

Cell = Union[int, float, str, None]


def format_number(value: Cell, digits: int) -> str:
    """Locale-independent %g formatting with `digits` significant digits; ints stay ints"""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    number = float(value)
    if math.isnan(number):
        return "nan"
    if math.isinf(number):
        return "inf" if number > 0 else "-inf"
    if number == 0.0:
        number = 0.0  # no "-0"
    return format(number, f".{digits}g")


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Cell]], stream: TextIO, digits: int) -> None:
    """Comma-separated rows with LF line endings"""
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(format_number(cell, digits) for cell in row) + "\n")


def write_text_atomic(path: Path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over path"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def _parse_float(token: str, path: Optional[Path], line_number: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DataInputError(f"cannot parse {token!r} as a number", path=path, line_number=line_number) from None
    if not math.isfinite(value):
        raise DataInputError(f"non-finite value {token!r}", path=path, line_number=line_number)
    return value


def parse_data_lines(lines: Iterable[str], path: Optional[Path] = None, column: Optional[str] = None) -> np.ndarray:
    """
    One float per line, or one CSV column when `column` is given (a 0-based
    index or a header name). Blank lines and `#` comments are skipped.
    """
    values: List[float] = []
    col_index: Optional[int] = None
    if column is not None and column.strip().lstrip("-").isdigit():
        col_index = int(column)
    need_header = column is not None and col_index is None

    for line_number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if column is None:
            values.append(_parse_float(line, path, line_number))
            continue
        cells = [cell.strip() for cell in line.split(",")]
        if need_header:
            if column not in cells:
                raise DataInputError(f"column {column!r} not found in header", path=path, line_number=line_number)
            col_index = cells.index(column)
            need_header = False
            continue
        assert col_index is not None
        if col_index >= len(cells) or col_index < -len(cells):
            raise DataInputError(f"row has no column {column}", path=path, line_number=line_number)
        values.append(_parse_float(cells[col_index], path, line_number))

    if not values:
        raise DataInputError("no data values found", path=path)
    return np.asarray(values, dtype=float)


def read_data_file(path: Path, column: Optional[str] = None) -> np.ndarray:
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        return parse_data_lines(handle, path=path, column=column)
