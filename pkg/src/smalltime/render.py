"""Timeline assembly and deterministic SVG output.

A timeline is a row of snapshot frames, each a small colored table plus a
numbered caption.  Cell colors code the most recent change since the
previous snapshot: unchanged, edited, added, or deleted.  The first frame is
always entirely unchanged.  Cells removed by a step make one last appearance
in that step's frame, filled with the deletion color and holding their final
values; afterwards they either leave a blank ghost outline in place (ghost
mode, the default, which keeps every cell at a fixed position throughout the
figure) or the table packs tight again (ghost off).

Missing values are shown as a lightened tint of the cell's code color, so a
blank that later gets imputed reads as "missing here, edited there".  A
resume marker, drawn as a vertical line in the gap before a frame, records
that the capture was paused and resumed before that snapshot.

The SVG writer is dependency-free and byte-deterministic: same timeline in,
same bytes out.  All coordinates are emitted with two decimals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diffing import StepDiff
from .errors import CaptionCountMismatch, LayoutOverflow, UnknownColumnInSubset
from .selection import SmallsetSelection
from .tables import Cell, SnapshotTable, TableRow

CODE_ORDER = ("U", "E", "A", "D")
LEGEND_LABELS = {"U": "unchanged", "E": "edited", "A": "added", "D": "deleted"}

_ROWID_W = 26.0
_MARGIN = 16.0
_FRAME_GAP_X = 26.0
_BAND_GAP_Y = 24.0
_GHOST_STROKE = "#C8C8C8"
_TEXT_COLOR = "#1A1A1A"
_MUTED_COLOR = "#8C8C8C"
_MARKER_COLOR = "#555555"


@dataclass(frozen=True)
class Palette:
    """Fill colors per change code plus the missing-value tint factor."""

    unchanged: str = "#E6E6E6"
    edited: str = "#E69F00"
    added: str = "#009E73"
    deleted: str = "#D55E00"
    tint_lighten: float = 0.45

    def color(self, code: str) -> str:
        return {
            "U": self.unchanged,
            "E": self.edited,
            "A": self.added,
            "D": self.deleted,
        }[code]

    def tint(self, code: str) -> str:
        """The code color linearly interpolated toward white."""
        base = self.color(code).lstrip("#")
        t = self.tint_lighten
        channels = (
            round(int(base[i : i + 2], 16) + (255 - int(base[i : i + 2], 16)) * t)
            for i in (0, 2, 4)
        )
        return "#" + "".join(f"{c:02X}" for c in channels)


@dataclass(frozen=True)
class RenderOptions:
    """Rendering knobs; all sizes are in points."""

    ghost: bool = True
    print_data: bool = True
    tints: bool = True
    columns: tuple[str, ...] | None = None
    rows_per_band: int = 10
    max_added_rows: int = 2
    sig_digits: int = 4
    max_text_chars: int = 10
    font_size: float = 8.0
    cell_w: float = 40.0
    cell_h: float = 13.0
    max_width: float | None = None


@dataclass(frozen=True)
class SnapshotEntry:
    """One frame of the timeline.

    ``table`` is the snapshot restricted to displayed rows and columns.
    ``step_codes`` maps every visible cell, including cells making their
    final deletion-colored appearance, to its change code; those departing
    cells are not part of ``table`` and carry their values in
    ``dying_values``.
    """

    table: SnapshotTable
    step_codes: dict[tuple[int, str], str]
    missing_mask: frozenset[tuple[int, str]]
    resume_before: bool
    dying_values: dict[tuple[int, str], Cell] = field(default_factory=dict)

    def value(self, rid: int, col: str) -> Cell:
        if (rid, col) in self.dying_values:
            return self.dying_values[(rid, col)]
        return self.table.cell(rid, col)


@dataclass(frozen=True)
class TimelineSpec:
    snapshots: tuple[SnapshotEntry, ...]
    captions: tuple[str, ...]
    palette: Palette
    options: RenderOptions
    display_rows: tuple[int, ...]
    display_columns: tuple[str, ...]

    def codes_present(self) -> tuple[str, ...]:
        seen = {"U"}
        for entry in self.snapshots:
            seen.update(entry.step_codes.values())
        return tuple(code for code in CODE_ORDER if code in seen)


@dataclass(frozen=True)
class CellRect:
    """Frame-local rectangle of one logical cell in one snapshot."""

    snapshot: int
    row_id: int
    column: str
    x: float
    y: float
    w: float
    h: float
    ghost: bool


def build_timeline(
    tables: list[SnapshotTable],
    diffs: list[StepDiff],
    selection: SmallsetSelection,
    captions: list[str],
    palette: Palette | None = None,
    options: RenderOptions | None = None,
) -> TimelineSpec:
    """Assemble the drawable timeline for a selection.

    Displays the selected original rows (in first-snapshot order) plus rows
    added mid-sequence, appended after them up to ``options.max_added_rows``
    with the lowest row ids winning.  Raises CaptionCountMismatch when the
    caption list does not line up one-to-one with the snapshots, and
    UnknownColumnInSubset when ``options.columns`` names a column that never
    exists in the sequence.
    """
    palette = palette or Palette()
    options = options or RenderOptions()
    if not tables:
        raise ValueError("a timeline needs at least one snapshot")
    if len(diffs) != len(tables) - 1:
        raise ValueError(f"{len(tables)} snapshots require {len(tables) - 1} diffs, got {len(diffs)}")
    if len(captions) != len(tables):
        raise CaptionCountMismatch(
            f"{len(captions)} captions for {len(tables)} snapshots"
        )
    first = tables[0]
    missing_sel = [rid for rid in selection.selected_row_ids if rid not in first.id_set]
    if missing_sel:
        raise ValueError(f"selected rows {missing_sel} are not in the first snapshot")

    added_ids: list[int] = []
    for diff in diffs:
        for rid in sorted(diff.rows_added):
            if rid not in first.id_set and rid not in added_ids:
                added_ids.append(rid)
    capped_added = sorted(added_ids)[: options.max_added_rows]

    selected = set(selection.selected_row_ids)
    display_rows = [rid for rid in first.row_ids if rid in selected] + capped_added

    universe = list(first.columns)
    for diff in diffs:
        for col in diff.cols_added:
            if col not in universe:
                universe.append(col)
    if options.columns is not None:
        unknown = [c for c in options.columns if c not in universe]
        if unknown:
            raise UnknownColumnInSubset(f"columns {unknown} never occur in this sequence")
        display_columns = list(options.columns)
    else:
        display_columns = universe

    row_set = set(display_rows)
    col_set = set(display_columns)
    entries = []
    for s, table in enumerate(tables):
        live_cols = [c for c in display_columns if c in table.columns]
        live_rows = [rid for rid in display_rows if rid in table.id_set]
        restricted = SnapshotTable(
            columns=tuple(live_cols),
            rows=tuple(
                TableRow(rid, tuple(table.cell(rid, c) for c in live_cols))
                for rid in live_rows
            ),
            label=table.label,
            resume_before=table.resume_before,
        )

        codes: dict[tuple[int, str], str] = {}
        dying: dict[tuple[int, str], Cell] = {}
        if s == 0:
            for rid in live_rows:
                for c in live_cols:
                    codes[(rid, c)] = "U"
        else:
            diff = diffs[s - 1]
            prev = tables[s - 1]
            added_rows = diff.rows_added & row_set
            added_cols = set(diff.cols_added) & col_set
            for rid in live_rows:
                for c in live_cols:
                    if rid in added_rows or c in added_cols:
                        codes[(rid, c)] = "A"
                    elif (rid, c) in diff.cells_edited:
                        codes[(rid, c)] = "E"
                    else:
                        codes[(rid, c)] = "U"
            # cells removed by this step appear once more, deletion-colored
            for rid in sorted(diff.rows_deleted & row_set):
                for c in display_columns:
                    if c in prev.columns and prev.has_row(rid):
                        codes[(rid, c)] = "D"
                        dying[(rid, c)] = prev.cell(rid, c)
            for c in diff.cols_deleted:
                if c not in col_set:
                    continue
                for rid in live_rows:
                    if prev.has_row(rid):
                        codes[(rid, c)] = "D"
                        dying[(rid, c)] = prev.cell(rid, c)

        mask = frozenset(
            (rid, c)
            for rid in live_rows
            for c in live_cols
            if table.cell(rid, c) is None
        )
        entries.append(
            SnapshotEntry(
                table=restricted,
                step_codes=codes,
                missing_mask=mask,
                resume_before=table.resume_before,
                dying_values=dying,
            )
        )

    return TimelineSpec(
        snapshots=tuple(entries),
        captions=tuple(captions),
        palette=palette,
        options=options,
        display_rows=tuple(display_rows),
        display_columns=tuple(display_columns),
    )


def layout_geometry(spec: TimelineSpec) -> tuple[CellRect, ...]:
    """Frame-local cell rectangles for every snapshot.

    Ghost mode places every logical cell at one fixed offset in all frames
    and returns outline-only placeholder rects where deleted cells used to
    be.  With ghost off each frame packs its remaining rows upward and its
    remaining columns leftward, so offsets shift after deletions.
    """
    opt = spec.options
    visible = [frozenset(entry.step_codes) for entry in spec.snapshots]
    rects: list[CellRect] = []

    if opt.ghost:
        row_pos = {rid: i for i, rid in enumerate(spec.display_rows)}
        col_pos = {c: j for j, c in enumerate(spec.display_columns)}
        seen: set[tuple[int, str]] = set()
        for s in range(len(spec.snapshots)):
            for rid in spec.display_rows:
                for c in spec.display_columns:
                    key = (rid, c)
                    here = key in visible[s]
                    if not here and key not in seen:
                        continue
                    rects.append(
                        CellRect(
                            snapshot=s,
                            row_id=rid,
                            column=c,
                            x=_ROWID_W + col_pos[c] * opt.cell_w,
                            y=(1 + row_pos[rid]) * opt.cell_h,
                            w=opt.cell_w,
                            h=opt.cell_h,
                            ghost=not here,
                        )
                    )
            seen.update(visible[s])
        return tuple(rects)

    for s in range(len(spec.snapshots)):
        frame_rows = [rid for rid in spec.display_rows if any(k[0] == rid for k in visible[s])]
        frame_cols = [c for c in spec.display_columns if any(k[1] == c for k in visible[s])]
        row_pos = {rid: i for i, rid in enumerate(frame_rows)}
        col_pos = {c: j for j, c in enumerate(frame_cols)}
        for rid in frame_rows:
            for c in frame_cols:
                if (rid, c) not in visible[s]:
                    continue
                rects.append(
                    CellRect(
                        snapshot=s,
                        row_id=rid,
                        column=c,
                        x=_ROWID_W + col_pos[c] * opt.cell_w,
                        y=(1 + row_pos[rid]) * opt.cell_h,
                        w=opt.cell_w,
                        h=opt.cell_h,
                        ghost=False,
                    )
                )
    return tuple(rects)


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _truncate(text: str, limit: int) -> str:
    if len(text) <= limit:
        return text
    return text[: max(1, limit - 1)] + "…"


def format_value(value: Cell, sig_digits: int, max_text_chars: int) -> str:
    """Printable form of a cell: rounded numbers, truncated text."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return f"{value:.{sig_digits}g}"
    return _truncate(value, max_text_chars)


def _wrap(text: str, width: int) -> list[str]:
    words = text.split()
    lines: list[str] = []
    current = ""
    for word in words:
        trial = f"{current} {word}".strip()
        if len(trial) <= width or not current:
            current = trial
        else:
            lines.append(current)
            current = word
    if current:
        lines.append(current)
    return lines


def render_svg(spec: TimelineSpec) -> str:
    """Serialize the timeline to SVG 1.1 text.

    Pure function of the spec: rerunning yields identical bytes.  Raises
    LayoutOverflow when the figure would exceed ``options.max_width``.
    """
    if not spec.snapshots:
        raise ValueError("cannot render a timeline with zero snapshots")
    opt = spec.options
    pal = spec.palette
    count = len(spec.snapshots)

    rects = layout_geometry(spec)
    by_frame: list[list[CellRect]] = [[] for _ in range(count)]
    for rect in rects:
        by_frame[rect.snapshot].append(rect)

    # frame content extents
    frame_w = []
    frame_table_h = []
    for s in range(count):
        frame = by_frame[s]
        if frame:
            frame_w.append(max(r.x + r.w for r in frame))
            frame_table_h.append(max(r.y + r.h for r in frame))
        else:
            frame_w.append(_ROWID_W + opt.cell_w)
            frame_table_h.append(opt.cell_h)
    slot_w = max(frame_w)

    number_h = opt.font_size + 8.0
    caption_line_h = opt.font_size + 2.5
    caption_pad = 8.0
    chars_per_line = max(16, int(slot_w / (opt.font_size * 0.52)))
    caption_lines = [_wrap(c, chars_per_line) for c in spec.captions]
    frame_h = [
        number_h + frame_table_h[s] + caption_pad + max(1, len(caption_lines[s])) * caption_line_h
        for s in range(count)
    ]

    per_band = max(1, opt.rows_per_band)
    bands = [list(range(b, min(b + per_band, count))) for b in range(0, count, per_band)]
    band_h = [max(frame_h[s] for s in band) for band in bands]

    legend_codes = spec.codes_present()
    legend_h = opt.font_size + 14.0

    widest_band = max(len(band) for band in bands)
    total_w = 2 * _MARGIN + widest_band * slot_w + (widest_band - 1) * _FRAME_GAP_X
    total_h = (
        2 * _MARGIN
        + legend_h
        + sum(band_h)
        + (len(bands) - 1) * _BAND_GAP_Y
    )
    if opt.max_width is not None and total_w > opt.max_width:
        raise LayoutOverflow(
            f"figure is {total_w:.0f}pt wide, over the configured max of {opt.max_width:.0f}pt; "
            f"lower rows_per_band (currently {opt.rows_per_band}) to wrap snapshots onto more bands"
        )

    origin: list[tuple[float, float]] = []
    y_cursor = _MARGIN + legend_h
    for b, band in enumerate(bands):
        for p, s in enumerate(band):
            origin.append((_MARGIN + p * (slot_w + _FRAME_GAP_X), y_cursor))
        y_cursor += band_h[b] + _BAND_GAP_Y

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{total_w:.2f}pt" height="{total_h:.2f}pt" '
        f'viewBox="0 0 {total_w:.2f} {total_h:.2f}">'
    )
    out.append(
        f'<rect x="0.00" y="0.00" width="{total_w:.2f}" height="{total_h:.2f}" fill="#FFFFFF"/>'
    )
    out.append(f'<g font-family="Helvetica, Arial, sans-serif" font-size="{opt.font_size:.2f}">')

    # legend
    out.append('<g class="legend">')
    lx = _MARGIN
    ly = _MARGIN
    swatch = opt.font_size + 1.5
    for code in legend_codes:
        label = LEGEND_LABELS[code]
        out.append(
            f'<rect class="legend-swatch" x="{lx:.2f}" y="{ly:.2f}" '
            f'width="{swatch:.2f}" height="{swatch:.2f}" fill="{pal.color(code)}" '
            f'stroke="#FFFFFF" stroke-width="0.50"/>'
        )
        out.append(
            f'<text x="{lx + swatch + 4:.2f}" y="{ly + swatch - 2:.2f}" '
            f'fill="{_TEXT_COLOR}">{label}</text>'
        )
        lx += swatch + 8 + len(label) * opt.font_size * 0.52 + 14
    out.append("</g>")

    for s, entry in enumerate(spec.snapshots):
        ox, oy = origin[s]
        frame = by_frame[s]
        out.append(f'<g class="snapshot" transform="translate({ox:.2f} {oy:.2f})">')
        out.append(
            f'<text class="snapshot-number" x="0.00" y="{opt.font_size + 1:.2f}" '
            f'font-weight="bold">{s + 1}.</text>'
        )

        header_cols: dict[str, tuple[float, bool]] = {}
        row_labels: dict[int, tuple[float, bool]] = {}
        for rect in frame:
            col_live = header_cols.get(rect.column, (0.0, False))[1]
            header_cols[rect.column] = (rect.x, col_live or not rect.ghost)
            row_live = row_labels.get(rect.row_id, (0.0, False))[1]
            row_labels[rect.row_id] = (rect.y, row_live or not rect.ghost)

        for col in spec.display_columns:
            if col not in header_cols:
                continue
            cx, live = header_cols[col]
            color = _TEXT_COLOR if live else _MUTED_COLOR
            name = _truncate(col, opt.max_text_chars)
            out.append(
                f'<text class="col-header" x="{cx + opt.cell_w / 2:.2f}" '
                f'y="{number_h + opt.cell_h - 4:.2f}" text-anchor="middle" '
                f'font-weight="bold" fill="{color}">{_escape(name)}</text>'
            )
        for rid in spec.display_rows:
            if rid not in row_labels:
                continue
            ry, live = row_labels[rid]
            color = _MUTED_COLOR if not live else "#5A5A5A"
            out.append(
                f'<text class="row-label" x="{_ROWID_W - 4:.2f}" '
                f'y="{number_h + ry + opt.cell_h - 4:.2f}" text-anchor="end" '
                f'fill="{color}">{rid}</text>'
            )

        for rect in sorted(frame, key=lambda r: (r.y, r.x)):
            y = number_h + rect.y
            if rect.ghost:
                out.append(
                    f'<rect class="cell ghost" x="{rect.x:.2f}" y="{y:.2f}" '
                    f'width="{rect.w:.2f}" height="{rect.h:.2f}" fill="none" '
                    f'stroke="{_GHOST_STROKE}" stroke-width="1.00"/>'
                )
                continue
            code = entry.step_codes[(rect.row_id, rect.column)]
            missing = (rect.row_id, rect.column) in entry.missing_mask
            if missing and opt.tints:
                fill = pal.tint(code)
            else:
                fill = pal.color(code)
            out.append(
                f'<rect class="cell" x="{rect.x:.2f}" y="{y:.2f}" '
                f'width="{rect.w:.2f}" height="{rect.h:.2f}" fill="{fill}" '
                f'stroke="#FFFFFF" stroke-width="0.50"/>'
            )
            if opt.print_data and not missing:
                text = format_value(
                    entry.value(rect.row_id, rect.column), opt.sig_digits, opt.max_text_chars
                )
                if text:
                    out.append(
                        f'<text class="cell-value" x="{rect.x + rect.w / 2:.2f}" '
                        f'y="{y + rect.h / 2 + opt.font_size * 0.35:.2f}" '
                        f'text-anchor="middle" fill="{_TEXT_COLOR}">{_escape(text)}</text>'
                    )

        cy = number_h + frame_table_h[s] + caption_pad + caption_line_h - 3
        out.append('<g class="caption">')
        for line in caption_lines[s]:
            out.append(f'<text x="0.00" y="{cy:.2f}" fill="{_TEXT_COLOR}">{_escape(line)}</text>')
            cy += caption_line_h
        out.append("</g>")
        out.append("</g>")

    for s, entry in enumerate(spec.snapshots):
        if s == 0 or not entry.resume_before:
            continue
        ox, oy = origin[s]
        x = ox - _FRAME_GAP_X / 2
        y1 = oy + number_h
        y2 = oy + number_h + frame_table_h[s]
        out.append(
            f'<line class="resume-marker" x1="{x:.2f}" y1="{y1:.2f}" '
            f'x2="{x:.2f}" y2="{y2:.2f}" stroke="{_MARKER_COLOR}" stroke-width="1.50"/>'
        )

    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
