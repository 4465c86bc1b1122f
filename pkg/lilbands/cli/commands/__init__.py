"""
Subcommands and the output helpers they share
"""

import io
import json
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from lilbands.core.config import settings
from lilbands.utils.io_utils import Cell, write_csv, write_text_atomic


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> str:
    buffer = io.StringIO(newline="\n")
    write_csv(header, rows, buffer, settings.CSV_SIGNIFICANT_DIGITS)
    return buffer.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def emit(text: str, out: Optional[Path]) -> None:
    """Primary output goes to `out` (atomically) or to stdout"""
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        write_text_atomic(out, text)
