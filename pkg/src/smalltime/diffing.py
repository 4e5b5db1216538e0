"""Change detection across a snapshot sequence.

Three derived structures drive everything downstream:

* a coverage matrix C, one row per original-table row and one column per
  step, where an entry is 1 when that step altered that row;
* an appearance matrix A over every row and column that ever existed, whose
  cells carry the last change each table cell underwent, coded U (unchanged),
  E (edited), A (added), or D (deleted);
* a pairwise Hamming distance matrix Q between the appearance rows of the
  original table, used to pick visually varied rows.

Conventions baked in here, chosen so the matrices match what a reader sees in
the rendered figure:

* a structural column change (any column added or deleted at a step) marks
  every row present at that step as altered;
* a deleted row shows D across all columns of A, including columns added
  after its deletion; a deleted column shows D for every row;
* replacing a missing value is an edit like any other;
* rows added mid-sequence appear in A after the original rows but are
  excluded from C and Q, which describe the original table only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tables import SnapshotTable, cells_equal


@dataclass(frozen=True)
class StepDiff:
    """What one step changed, derived from the snapshots around it."""

    step: int
    rows_deleted: frozenset[int]
    rows_added: frozenset[int]
    cols_deleted: tuple[str, ...]
    cols_added: tuple[str, ...]
    cells_edited: frozenset[tuple[int, str]]
    cells_missing_after: frozenset[tuple[int, str]]

    @property
    def structural(self) -> bool:
        return bool(self.cols_deleted or self.cols_added)

    @property
    def empty(self) -> bool:
        return not (
            self.rows_deleted
            or self.rows_added
            or self.cols_deleted
            or self.cols_added
            or self.cells_edited
        )


def diff_step(
    prev: SnapshotTable,
    nxt: SnapshotTable,
    step: int,
    epsilon: float = 0.0,
) -> StepDiff:
    """Diff two consecutive snapshots.

    Rows pair up by row id, columns by name, so reordering either is never a
    change.  A cell counts as edited only when both its row and column exist
    on both sides; everything else is an addition or deletion.
    """
    rows_deleted = prev.id_set - nxt.id_set
    rows_added = nxt.id_set - prev.id_set
    cols_deleted = tuple(c for c in prev.columns if c not in nxt.columns)
    cols_added = tuple(c for c in nxt.columns if c not in prev.columns)
    shared_cols = [c for c in nxt.columns if c in prev.columns]

    edited = set()
    for row in nxt.rows:
        if row.row_id not in prev.id_set:
            continue
        for col in shared_cols:
            if not cells_equal(prev.cell(row.row_id, col), nxt.cell(row.row_id, col), epsilon):
                edited.add((row.row_id, col))

    missing = set()
    for row in nxt.rows:
        for col, value in zip(nxt.columns, row.cells):
            if value is None:
                missing.add((row.row_id, col))

    return StepDiff(
        step=step,
        rows_deleted=frozenset(rows_deleted),
        rows_added=frozenset(rows_added),
        cols_deleted=cols_deleted,
        cols_added=cols_added,
        cells_edited=frozenset(edited),
        cells_missing_after=frozenset(missing),
    )


def diff_sequence(tables: list[SnapshotTable], epsilon: float = 0.0) -> list[StepDiff]:
    """Diff every consecutive snapshot pair; step numbers are 1-based."""
    return [
        diff_step(prev, nxt, step, epsilon)
        for step, (prev, nxt) in enumerate(zip(tables, tables[1:]), start=1)
    ]


def edits_by_column(diff: StepDiff) -> dict[str, int]:
    """Edited-cell counts per column, in sorted column order."""
    counts: dict[str, int] = {}
    for _, col in diff.cells_edited:
        counts[col] = counts.get(col, 0) + 1
    return dict(sorted(counts.items()))


@dataclass(frozen=True)
class CoverageMatrix:
    """Binary rows-by-steps indicator of which step touched which row."""

    entries: tuple[tuple[int, ...], ...]
    row_ids: tuple[int, ...]

    @property
    def step_count(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def column(self, h: int) -> tuple[int, ...]:
        return tuple(row[h] for row in self.entries)


@dataclass(frozen=True)
class AppearanceMatrix:
    """Last-change codes for every cell that ever existed.

    Rows: the original table's rows in order, then rows added mid-sequence in
    order of first appearance.  ``original_rows`` counts the leading original
    block.  Columns: the original columns, then added columns in order of
    appearance.
    """

    codes: tuple[tuple[str, ...], ...]
    row_ids: tuple[int, ...]
    columns: tuple[str, ...]
    original_rows: int

    def vector(self, row_id: int) -> tuple[str, ...]:
        return self.codes[self.row_ids.index(row_id)]


@dataclass(frozen=True)
class DistanceMatrix:
    """Pairwise Hamming distances between appearance rows of original rows."""

    q: tuple[tuple[int, ...], ...]
    row_ids: tuple[int, ...]


def build_coverage(diffs: list[StepDiff], original: SnapshotTable) -> CoverageMatrix:
    """Build C over the original table's rows.

    A row is covered by the step that deletes it, by any step that edits one
    of its cells, and by any step that adds or deletes a column while the row
    is present.  Rows added mid-sequence are not represented.
    """
    alive = set(original.id_set)
    per_row: dict[int, list[int]] = {rid: [] for rid in original.row_ids}
    for diff in diffs:
        edited_rows = {rid for rid, _ in diff.cells_edited}
        for rid in original.row_ids:
            if rid in diff.rows_deleted:
                hit = 1
            elif rid in alive and (diff.structural or rid in edited_rows):
                hit = 1
            else:
                hit = 0
            per_row[rid].append(hit)
        alive -= diff.rows_deleted
    return CoverageMatrix(
        entries=tuple(tuple(per_row[rid]) for rid in original.row_ids),
        row_ids=original.row_ids,
    )


# Appearance state is kept as a mutable builder so a sequence can be folded
# step by step; build_appearance is a fold over _apply_step, which makes the
# incremental and the whole-sequence paths provably the same code.

class _AppearanceState:
    def __init__(self, original: SnapshotTable):
        self.row_order: list[int] = list(original.row_ids)
        self.col_order: list[str] = list(original.columns)
        self.original_rows = len(self.row_order)
        self.dead_rows: set[int] = set()
        self.dead_cols: set[str] = set()
        self.codes: dict[tuple[int, str], str] = {
            (rid, col): "U" for rid in self.row_order for col in self.col_order
        }

    def alive_rows(self) -> list[int]:
        return [r for r in self.row_order if r not in self.dead_rows]

    def alive_cols(self) -> list[str]:
        return [c for c in self.col_order if c not in self.dead_cols]


def _apply_step(state: _AppearanceState, diff: StepDiff) -> None:
    for rid in sorted(diff.rows_deleted):
        state.dead_rows.add(rid)
    for col in diff.cols_deleted:
        state.dead_cols.add(col)
        for rid in state.row_order:
            state.codes[(rid, col)] = "D"
    for col in diff.cols_added:
        if col not in state.col_order:
            state.col_order.append(col)
        state.dead_cols.discard(col)
        for rid in state.alive_rows():
            state.codes[(rid, col)] = "A"
    for rid in sorted(diff.rows_added):
        if rid not in state.row_order:
            state.row_order.append(rid)
        state.dead_rows.discard(rid)
        for col in state.alive_cols():
            state.codes[(rid, col)] = "A"
    for rid, col in diff.cells_edited:
        state.codes[(rid, col)] = "E"


def _finalize(state: _AppearanceState) -> AppearanceMatrix:
    # Deletion absorbs everything: a dead row is all D, a dead column is D
    # for every row, including rows that never coexisted with it.
    grid = []
    for rid in state.row_order:
        row_codes = []
        for col in state.col_order:
            if rid in state.dead_rows or col in state.dead_cols:
                row_codes.append("D")
            else:
                row_codes.append(state.codes.get((rid, col), "U"))
        grid.append(tuple(row_codes))
    return AppearanceMatrix(
        codes=tuple(grid),
        row_ids=tuple(state.row_order),
        columns=tuple(state.col_order),
        original_rows=state.original_rows,
    )


def build_appearance(diffs: list[StepDiff], original: SnapshotTable) -> AppearanceMatrix:
    """Fold the step diffs into the last-change appearance matrix."""
    state = _AppearanceState(original)
    for diff in diffs:
        _apply_step(state, diff)
    return _finalize(state)


def build_distance(appearance: AppearanceMatrix) -> DistanceMatrix:
    """Hamming distances between original-row appearance vectors.

    Symmetric with a zero diagonal; added rows are left out so the matrix
    lines up with the coverage matrix row for row.
    """
    n = appearance.original_rows
    vectors = appearance.codes[:n]
    q = [[0] * n for _ in range(n)]
    for i in range(n):
        for l in range(i + 1, n):
            d = sum(1 for a, b in zip(vectors[i], vectors[l]) if a != b)
            q[i][l] = d
            q[l][i] = d
    return DistanceMatrix(
        q=tuple(tuple(row) for row in q),
        row_ids=appearance.row_ids[:n],
    )


def matrices_to_dict(
    coverage: CoverageMatrix,
    appearance: AppearanceMatrix,
    steps: list[str],
) -> dict:
    """JSON-ready view of both matrices.

    ``row_ids`` lists the appearance rows; the coverage matrix covers the
    leading original block of them.
    """
    return {
        "coverage": [list(row) for row in coverage.entries],
        "appearance": [list(row) for row in appearance.codes],
        "row_ids": list(appearance.row_ids),
        "columns": list(appearance.columns),
        "steps": list(steps),
    }
