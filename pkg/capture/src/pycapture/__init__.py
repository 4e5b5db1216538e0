"""Capture dataset snapshots from a commented preprocessing script.

Add marker comments (``# start smallset df``, ``# snap df``, ``# resume
df``, ``# end smallset df``) to a script that transforms one pandas
DataFrame, then run ``pycapture script.py --out dir``.  The script executes
normally; at each marker the table is dumped as a CSV snapshot, and a
manifest compatible with the Timeline toolchain is written alongside.
"""

from .errors import (
    CaptureError,
    MixedVariables,
    NoEndMarker,
    NoStartMarker,
    NotTabular,
    OutOfOrderMarker,
    ScriptError,
    VariableUndefined,
)
from .markers import END, RESUME, SNAP, START, MarkerDirective, parse_markers
from .runner import (
    DEFAULT_NA_TOKEN,
    DEFAULT_ROWID_COLUMN,
    CaptureResult,
    format_cell,
    run_capture,
)

__all__ = [
    "CaptureError",
    "CaptureResult",
    "DEFAULT_NA_TOKEN",
    "DEFAULT_ROWID_COLUMN",
    "END",
    "MarkerDirective",
    "MixedVariables",
    "NoEndMarker",
    "NoStartMarker",
    "NotTabular",
    "OutOfOrderMarker",
    "RESUME",
    "SNAP",
    "START",
    "ScriptError",
    "VariableUndefined",
    "format_cell",
    "parse_markers",
    "run_capture",
]
