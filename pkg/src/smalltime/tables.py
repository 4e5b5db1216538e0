"""Snapshot tables, typed cells, and the capture manifest.

A preprocessing run is recorded as an ordered sequence of snapshot files, one
CSV per snapshot, tied together by a small JSON manifest.  This module owns
that on-disk contract:

* snapshot files are RFC 4180 CSV, UTF-8, header first, LF or CRLF endings;
* one reserved column (``rowid_column`` in the manifest, ``__rowid__`` by
  default) carries a stable integer identity for every row, so rows can be
  traced across snapshots no matter how they are filtered or reordered;
* a configurable list of ``na_tokens`` maps verbatim cell text to the missing
  state.  Missing is a real cell state here, never conflated with empty text.

Cell values are typed on load: a cell becomes a number when its text lexes as
a decimal numeral, a boolean for literal true/false in any case, and text
otherwise.  All structures are immutable after load and safe to share across
threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .errors import (
    DuplicateColumn,
    DuplicateRowId,
    InvalidRowId,
    MalformedManifest,
    MissingRowIdColumn,
    MissingSnapshotFile,
    RaggedRow,
    VersionUnsupported,
)

import csv

# A cell is one typed scalar; None encodes the missing state.
Cell = str | int | float | bool | None

MANIFEST_VERSION = 1
DEFAULT_ROWID_COLUMN = "__rowid__"
DEFAULT_NA_TOKENS = ("", "NA")

_INT_RE = re.compile(r"[+-]?[0-9]+\Z")
_FLOAT_RE = re.compile(r"[+-]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)([eE][+-]?[0-9]+)?\Z")


def parse_cell(raw: str, na_tokens: tuple[str, ...]) -> Cell:
    """Type one CSV field.

    The NA check happens first and matches the field verbatim, so a token
    list containing "" turns empty fields into missing cells while " " stays
    ordinary text.  Numerals are gated by a regex rather than float() alone,
    which keeps "inf", "nan" and underscore-grouped digits as plain text.
    """
    if raw in na_tokens:
        return None
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    if _INT_RE.match(raw):
        return int(raw)
    if _FLOAT_RE.match(raw):
        return float(raw)
    return raw


def format_cell(value: Cell, na_token: str = "") -> str:
    """Inverse of parse_cell for values that came through a load."""
    if value is None:
        return na_token
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cells_equal(a: Cell, b: Cell, epsilon: float = 0.0) -> bool:
    """Typed cell comparison used everywhere a change is detected.

    Missing equals only missing.  Booleans compare only with booleans, so a
    flag column never silently matches a 0/1 column.  Numbers compare across
    int/float, exactly by default or within ``epsilon`` when one is given.
    """
    if a is None or b is None:
        return a is None and b is None
    a_bool = isinstance(a, bool)
    b_bool = isinstance(b, bool)
    if a_bool or b_bool:
        return a_bool and b_bool and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        if epsilon > 0.0:
            return abs(a - b) <= epsilon
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return False


@dataclass(frozen=True)
class TableRow:
    row_id: int
    cells: tuple[Cell, ...]


@dataclass(frozen=True)
class SnapshotTable:
    """One snapshot of the evolving data table.

    ``columns`` excludes the reserved row-id column; each row's ``cells``
    align with ``columns`` positionally.  ``resume_before`` marks that the
    recording was paused and resumed just before this snapshot was taken.
    """

    columns: tuple[str, ...]
    rows: tuple[TableRow, ...]
    label: str = ""
    resume_before: bool = False

    @cached_property
    def id_set(self) -> frozenset[int]:
        return frozenset(r.row_id for r in self.rows)

    @cached_property
    def _row_map(self) -> dict[int, TableRow]:
        return {r.row_id: r for r in self.rows}

    @cached_property
    def _column_pos(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.columns)}

    @property
    def row_ids(self) -> tuple[int, ...]:
        return tuple(r.row_id for r in self.rows)

    def row(self, row_id: int) -> TableRow:
        return self._row_map[row_id]

    def has_row(self, row_id: int) -> bool:
        return row_id in self._row_map

    def cell(self, row_id: int, column: str) -> Cell:
        return self._row_map[row_id].cells[self._column_pos[column]]

    def equals_content(self, other: "SnapshotTable", epsilon: float = 0.0) -> bool:
        """True when both snapshots hold the same grid of typed values."""
        if self.columns != other.columns:
            return False
        if self.row_ids != other.row_ids:
            return False
        for mine, theirs in zip(self.rows, other.rows):
            for a, b in zip(mine.cells, theirs.cells):
                if not cells_equal(a, b, epsilon):
                    return False
        return True


@dataclass(frozen=True)
class ManifestEntry:
    index: int
    label: str
    path: str
    resume_before: bool = False


@dataclass(frozen=True)
class CaptureManifest:
    """Parsed manifest describing one recorded snapshot sequence."""

    version: int
    rowid_column: str
    na_tokens: tuple[str, ...]
    snapshots: tuple[ManifestEntry, ...]
    base_dir: Path = field(default_factory=Path, compare=False)

    def resolve(self, entry: ManifestEntry) -> Path:
        return self.base_dir / entry.path

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "rowid_column": self.rowid_column,
            "na_tokens": list(self.na_tokens),
            "snapshots": [
                {
                    "index": e.index,
                    "label": e.label,
                    "path": e.path,
                    "resume_before": e.resume_before,
                }
                for e in self.snapshots
            ],
        }


_MANIFEST_FIELDS = {"version", "rowid_column", "na_tokens", "snapshots"}
_ENTRY_FIELDS = {"index", "label", "path", "resume_before"}


def load_manifest(path: str | Path, strict: bool = False) -> CaptureManifest:
    """Read and validate a manifest file.

    Snapshot paths are resolved relative to the manifest's own directory and
    must all exist.  Entry indices must run 0..S-1 in file order and at least
    two snapshots are required; a single table is not a sequence.  Unknown
    fields are ignored unless ``strict`` is set, in which case they are
    rejected.

    Raises:
        MalformedManifest: bad JSON, bad field types, bad index order.
        VersionUnsupported: integer version this build does not read.
        MissingSnapshotFile: a listed snapshot path does not exist.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise MalformedManifest(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedManifest(f"manifest {path} is not valid JSON: {exc}") from exc

    if not isinstance(raw, dict):
        raise MalformedManifest(f"manifest {path} must be a JSON object")
    if strict:
        unknown = sorted(set(raw) - _MANIFEST_FIELDS)
        if unknown:
            raise MalformedManifest(f"manifest {path} has unknown fields: {unknown}")
    for required in _MANIFEST_FIELDS:
        if required not in raw:
            raise MalformedManifest(f"manifest {path} lacks required field '{required}'")

    version = raw["version"]
    if not isinstance(version, int) or isinstance(version, bool):
        raise MalformedManifest(f"manifest version must be an integer, got {version!r}")
    if version != MANIFEST_VERSION:
        raise VersionUnsupported(
            f"manifest version {version} is not supported (this build reads version {MANIFEST_VERSION})"
        )

    rowid_column = raw["rowid_column"]
    if not isinstance(rowid_column, str) or not rowid_column:
        raise MalformedManifest("rowid_column must be a non-empty string")

    na_tokens = raw["na_tokens"]
    if not isinstance(na_tokens, list) or not all(isinstance(t, str) for t in na_tokens):
        raise MalformedManifest("na_tokens must be a list of strings")

    entries_raw = raw["snapshots"]
    if not isinstance(entries_raw, list):
        raise MalformedManifest("snapshots must be a list")
    if len(entries_raw) < 2:
        raise MalformedManifest(
            f"manifest lists {len(entries_raw)} snapshot(s); a sequence needs at least 2"
        )

    entries = []
    for position, item in enumerate(entries_raw):
        if not isinstance(item, dict):
            raise MalformedManifest(f"snapshot entry {position} must be an object")
        if strict:
            unknown = sorted(set(item) - _ENTRY_FIELDS)
            if unknown:
                raise MalformedManifest(
                    f"snapshot entry {position} has unknown fields: {unknown}"
                )
        for required in ("index", "label", "path"):
            if required not in item:
                raise MalformedManifest(
                    f"snapshot entry {position} lacks required field '{required}'"
                )
        index = item["index"]
        if not isinstance(index, int) or isinstance(index, bool) or index != position:
            raise MalformedManifest(
                f"snapshot entry {position} has index {index!r}; indices must run 0..{len(entries_raw) - 1} in order"
            )
        label = item["label"]
        rel = item["path"]
        if not isinstance(label, str) or not isinstance(rel, str) or not rel:
            raise MalformedManifest(f"snapshot entry {position} has a bad label or path")
        resume = item.get("resume_before", False)
        if not isinstance(resume, bool):
            raise MalformedManifest(f"snapshot entry {position}: resume_before must be a boolean")
        entries.append(ManifestEntry(index=index, label=label, path=rel, resume_before=resume))

    manifest = CaptureManifest(
        version=version,
        rowid_column=rowid_column,
        na_tokens=tuple(na_tokens),
        snapshots=tuple(entries),
        base_dir=path.parent,
    )
    for entry in manifest.snapshots:
        if not manifest.resolve(entry).is_file():
            raise MissingSnapshotFile(
                f"snapshot {entry.index} file not found: {manifest.resolve(entry)}"
            )
    return manifest


def load_snapshot(path: str | Path, manifest: CaptureManifest) -> SnapshotTable:
    """Read one snapshot CSV under the manifest's parsing rules.

    The reserved row-id column may sit anywhere in the file; it is stripped
    from the cell grid and its values become row identities.  Column order is
    otherwise preserved.  A file with a header and no records is a valid
    empty snapshot.

    Raises:
        MissingRowIdColumn, InvalidRowId, DuplicateRowId, DuplicateColumn,
        RaggedRow.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as handle:
        records = list(csv.reader(handle))
    if not records:
        raise MissingRowIdColumn(f"{path}: empty file, no header record")

    header = records[0]
    seen: set[str] = set()
    for name in header:
        if name in seen:
            raise DuplicateColumn(f"{path}: column '{name}' appears twice in the header")
        seen.add(name)
    if manifest.rowid_column not in seen:
        raise MissingRowIdColumn(
            f"{path}: reserved row-id column '{manifest.rowid_column}' not in header"
        )
    rowid_pos = header.index(manifest.rowid_column)
    columns = tuple(name for i, name in enumerate(header) if i != rowid_pos)

    rows = []
    ids: set[int] = set()
    for number, record in enumerate(records[1:], start=2):
        if len(record) != len(header):
            raise RaggedRow(
                f"{path}:{number}: record has {len(record)} fields, header has {len(header)}"
            )
        raw_id = record[rowid_pos]
        if not _INT_RE.match(raw_id):
            raise InvalidRowId(f"{path}:{number}: row id {raw_id!r} is not an integer")
        row_id = int(raw_id)
        if row_id in ids:
            raise DuplicateRowId(f"{path}:{number}: row id {row_id} appears twice")
        ids.add(row_id)
        cells = tuple(
            parse_cell(fieldtext, manifest.na_tokens)
            for i, fieldtext in enumerate(record)
            if i != rowid_pos
        )
        rows.append(TableRow(row_id=row_id, cells=cells))

    entry = _entry_for(path, manifest)
    return SnapshotTable(
        columns=columns,
        rows=tuple(rows),
        label=entry.label if entry else path.stem,
        resume_before=entry.resume_before if entry else False,
    )


def _entry_for(path: Path, manifest: CaptureManifest) -> ManifestEntry | None:
    resolved = path.resolve()
    for entry in manifest.snapshots:
        if manifest.resolve(entry).resolve() == resolved:
            return entry
    return None


def load_all(manifest: CaptureManifest) -> list[SnapshotTable]:
    """Load every snapshot listed in the manifest, in index order."""
    return [load_snapshot(manifest.resolve(entry), manifest) for entry in manifest.snapshots]


def write_snapshot(
    table: SnapshotTable,
    path: str | Path,
    rowid_column: str = DEFAULT_ROWID_COLUMN,
    na_token: str = "",
) -> None:
    """Serialize a snapshot back to CSV.

    For any table produced by load_snapshot this round-trips every value and
    every missing cell.  The row-id column is written first.
    """
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([rowid_column, *table.columns])
        for row in table.rows:
            writer.writerow([str(row.row_id), *(format_cell(c, na_token) for c in row.cells)])


@dataclass(frozen=True)
class SequenceWarning:
    """One advisory produced by validate_sequence."""

    code: str
    message: str


RECOMMENDED_MIN_ROWS = 5
RECOMMENDED_MAX_ROWS = 15
RECOMMENDED_MAX_SNAPSHOTS = 10


def validate_sequence(tables: list[SnapshotTable]) -> list[SequenceWarning]:
    """Sanity-check a loaded snapshot sequence.

    Returns advisories, never raises: a sequence that loads is usable, these
    point at likely recording mistakes.  Checked here:

    * more snapshots than the readability recommendation (2-10);
    * a first snapshot too small to draw a 5-15 row Smallset from;
    * row ids or columns that vanish and later reappear, which means the
      first snapshot is not a stable superset of what follows and identity
      cannot be trusted;
    * consecutive snapshots with identical content (a step changed nothing).
    """
    warnings: list[SequenceWarning] = []
    if len(tables) > RECOMMENDED_MAX_SNAPSHOTS:
        warnings.append(
            SequenceWarning(
                code="snapshot-count",
                message=(
                    f"sequence has {len(tables)} snapshots; figures stay readable "
                    f"with 2-{RECOMMENDED_MAX_SNAPSHOTS}"
                ),
            )
        )
    if tables and len(tables[0].rows) < RECOMMENDED_MIN_ROWS:
        warnings.append(
            SequenceWarning(
                code="smallset-size",
                message=(
                    f"first snapshot has only {len(tables[0].rows)} rows, below the "
                    f"recommended {RECOMMENDED_MIN_ROWS}-{RECOMMENDED_MAX_ROWS} row Smallset range"
                ),
            )
        )

    warnings.extend(_presence_gaps(tables, kind="row"))
    warnings.extend(_presence_gaps(tables, kind="column"))

    for step, (before, after) in enumerate(zip(tables, tables[1:]), start=1):
        if before.equals_content(after):
            warnings.append(
                SequenceWarning(
                    code="no-change-step",
                    message=f"step {step} produced no change: snapshots {step} and {step + 1} are identical",
                )
            )
    return warnings


def _presence_gaps(tables: list[SnapshotTable], kind: str) -> list[SequenceWarning]:
    # A row id or column that disappears and then returns breaks the rule
    # that the first snapshot plus explicit additions account for everything.
    out = []
    if kind == "row":
        universe: list = sorted({rid for t in tables for rid in t.id_set})
        present = [[rid in t.id_set for t in tables] for rid in universe]
    else:
        universe = sorted({c for t in tables for c in t.columns})
        present = [[c in t.columns for t in tables] for c in universe]
    for name, flags in zip(universe, present):
        first = flags.index(True)
        last = len(flags) - 1 - flags[::-1].index(True)
        if not all(flags[first : last + 1]):
            out.append(
                SequenceWarning(
                    code=f"{kind}-gap",
                    message=(
                        f"{kind} {name!r} reappears after being absent; the first snapshot "
                        "is not superset-compatible with later ones and identity may be unstable"
                    ),
                )
            )
    return out
