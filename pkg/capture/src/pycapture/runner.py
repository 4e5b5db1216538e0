"""Execute a marked script segment by segment and dump snapshots.

The script runs cumulatively in one namespace, the way ``python script.py``
would, with two differences: at the start marker the reserved row-id column
is assigned from the table's current index, and at every start/snap/end
marker the tracked variable is serialized to a CSV snapshot.  Capture
inspects state only at marker lines; between markers the script may do
anything, including temporarily rebinding the tracked name.

Snapshots and the manifest use the Timeline toolchain's file formats: the
row-id column first, ``NA`` (configurable) for missing cells, booleans as
true/false, floats via repr.  Row ids come from the reserved column the
start marker created, so they survive filtering; if the script drops that
column, ids fall back to the current index.

User code runs single-threaded with the invoking user's privileges; there
is no sandboxing.  Data that flows through called functions rather than the
tracked variable is not followed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from .errors import CaptureError, NotTabular, ScriptError, VariableUndefined
from .markers import END, RESUME, SPELLING, START, MarkerDirective, parse_markers

MANIFEST_VERSION = 1
DEFAULT_ROWID_COLUMN = "__rowid__"
DEFAULT_NA_TOKEN = "NA"


@dataclass
class CaptureResult:
    manifest_path: Path
    snapshot_paths: list[Path]
    manifest: dict


def format_cell(value, na_token: str) -> str:
    """Serialize one cell the way the Timeline loader will parse it back."""
    try:
        if bool(pd.isna(value)):
            return na_token
    except (TypeError, ValueError):
        pass  # array-valued cell; stringify below
    if hasattr(value, "item") and not isinstance(value, str):
        try:
            value = value.item()
        except (AttributeError, ValueError):
            pass
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _is_missing(value) -> bool:
    try:
        return bool(pd.isna(value))
    except (TypeError, ValueError):
        return False


def _rowid_values(table: pd.DataFrame, rowid_col: str) -> list:
    """Row ids for one dump: the reserved column, the index as fallback.

    Rows added after the start marker have no value in the reserved column,
    so their id comes from their index label; the NaN they introduce also
    upcasts the column to float, so integral floats fold back to int.
    """
    if rowid_col in table.columns:
        ids = [
            idx if _is_missing(val) else val
            for idx, val in zip(table.index, table[rowid_col].tolist())
        ]
    else:
        ids = list(table.index)
    out = []
    for value in ids:
        if hasattr(value, "item") and not isinstance(value, str):
            try:
                value = value.item()
            except (AttributeError, ValueError):
                pass
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        out.append(value)
    return out


def _write_snapshot(table: pd.DataFrame, path: Path, rowid_col: str, na_token: str) -> None:
    columns = [c for c in table.columns if c != rowid_col]
    ids = _rowid_values(table, rowid_col)
    data = {c: table[c].tolist() for c in columns}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([rowid_col] + columns)
        for i, rid in enumerate(ids):
            writer.writerow(
                [format_cell(rid, na_token)] + [format_cell(data[c][i], na_token) for c in columns]
            )


def _observe(namespace: dict, marker: MarkerDirective) -> pd.DataFrame:
    spelled = SPELLING[marker.action]
    if marker.variable not in namespace:
        raise VariableUndefined(
            f"line {marker.line}: '# {spelled} {marker.variable}' names an undefined variable"
        )
    value = namespace[marker.variable]
    if not isinstance(value, pd.DataFrame):
        raise NotTabular(
            f"line {marker.line}: {marker.variable} is {type(value).__name__}, not a 2-D table"
        )
    return value


def _run_segment(lines: list[str], start: int, stop: int, namespace: dict, path: Path) -> None:
    """Execute source lines[start:stop] (0-based, stop exclusive) in place.

    The segment is padded with blank lines before compiling so tracebacks
    and the wrapped ScriptError point at true script line numbers.
    """
    segment = lines[start:stop]
    if not any(s.strip() for s in segment):
        return
    padded = "\n" * start + "\n".join(segment)
    try:
        code = compile(padded, str(path), "exec")
        exec(code, namespace)
    except (Exception, SystemExit) as exc:
        if isinstance(exc, CaptureError):
            raise
        raise ScriptError(
            f"lines {start + 1}-{stop}: {type(exc).__name__}: {exc}"
        ) from exc


def run_capture(
    script_path,
    out_dir,
    rowid_col: str = DEFAULT_ROWID_COLUMN,
    na_token: str = DEFAULT_NA_TOKEN,
) -> CaptureResult:
    """Run the script, dumping a snapshot at every start/snap/end marker.

    Writes ``snap_<i>.csv`` per snapshot plus ``manifest.json`` into
    ``out_dir`` (created if needed) and returns their paths.  A ``resume``
    marker flags the next snapshot with ``resume_before``.  Raises the
    marker-grammar errors, VariableUndefined / NotTabular for a bad
    observation, and ScriptError (carrying the failing segment's line
    range) when user code raises.
    """
    script_path = Path(script_path)
    out_dir = Path(out_dir)
    try:
        source = script_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CaptureError(f"cannot read script {script_path}: {exc}") from exc
    markers = parse_markers(source)

    out_dir.mkdir(parents=True, exist_ok=True)
    lines = source.splitlines()
    namespace: dict = {"__name__": "__main__", "__file__": str(script_path)}

    entries: list[dict] = []
    paths: list[Path] = []
    snap_count = 0
    resume_pending = False
    consumed = 0  # source lines executed so far (1-based line of last marker)
    for marker in markers:
        _run_segment(lines, consumed, marker.line - 1, namespace, script_path)
        consumed = marker.line
        if marker.action == RESUME:
            resume_pending = True
            continue
        table = _observe(namespace, marker)
        if marker.action == START:
            table[rowid_col] = table.index
            label = "start"
        elif marker.action == END:
            label = "end"
        else:
            snap_count += 1
            label = f"snap {snap_count}"
        index = len(entries)
        filename = f"snap_{index}.csv"
        _write_snapshot(table, out_dir / filename, rowid_col, na_token)
        entries.append(
            {
                "index": index,
                "label": label,
                "path": filename,
                "resume_before": resume_pending,
            }
        )
        paths.append(out_dir / filename)
        resume_pending = False
    _run_segment(lines, consumed, len(lines), namespace, script_path)

    manifest = {
        "version": MANIFEST_VERSION,
        "rowid_column": rowid_col,
        "na_tokens": [na_token],
        "snapshots": entries,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return CaptureResult(manifest_path=manifest_path, snapshot_paths=paths, manifest=manifest)
