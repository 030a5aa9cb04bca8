"""Sweep configuration, execution and CSV output."""

from .config import AXES, SweepSpec, parse_config
from .presets import PRESETS
from .runner import CSV_COLUMNS, ResultRow, emit_csv, format_csv, read_csv, run_sweep

__all__ = [
    "AXES",
    "CSV_COLUMNS",
    "PRESETS",
    "ResultRow",
    "SweepSpec",
    "emit_csv",
    "format_csv",
    "parse_config",
    "read_csv",
    "run_sweep",
]
