"""Caption templates and accessible figure descriptions.

Captions live in a plain text file with one ``## snapshot N`` section per
snapshot.  Lines starting with ``#`` are hints for the author and are
dropped on parsing; the template writer pre-fills each section's hint with
the change counts for that step so the prose can be written against facts.

Alt text is generated from the assembled timeline itself, so its change
counts describe exactly what the figure shows.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

from .diffing import StepDiff, edits_by_column
from .errors import CaptionCountMismatch, MissingSection, SmalltimeWarning
from .render import LEGEND_LABELS, TimelineSpec
from .selection import SmallsetSelection

_SECTION_RE = re.compile(r"^##\s*snapshot\s+(\d+)\s*$", re.IGNORECASE)

_COLOR_NAMES = {
    "#E6E6E6": "light gray",
    "#E69F00": "orange",
    "#009E73": "bluish green",
    "#D55E00": "vermilion",
    "#000000": "black",
    "#FFFFFF": "white",
}

ALT_LINE_WIDTH = 100


@dataclass(frozen=True)
class CaptionSet:
    texts: tuple[str, ...]


def _count_phrase(n: int, noun: str) -> str:
    return f"{n} {noun}" if n == 1 else f"{n} {noun}s"


def _step_hint(diff: StepDiff) -> str:
    if diff.empty:
        return "no changes detected (0 rows affected)"
    parts = []
    if diff.rows_deleted:
        parts.append(f"{_count_phrase(len(diff.rows_deleted), 'row')} deleted")
    if diff.rows_added:
        parts.append(f"{_count_phrase(len(diff.rows_added), 'row')} added")
    for col in diff.cols_deleted:
        parts.append(f"column {col} deleted")
    for col in diff.cols_added:
        parts.append(f"column {col} added")
    if diff.cells_edited:
        by_col = edits_by_column(diff)
        detail = ", ".join(f"{n} in {col}" for col, n in by_col.items())
        parts.append(f"{_count_phrase(len(diff.cells_edited), 'cell')} edited ({detail})")
    return "; ".join(parts)


def emit_caption_template(diffs: list[StepDiff], selection: SmallsetSelection) -> str:
    """Caption file skeleton with one section per snapshot.

    Section 1 covers the starting data; section h+1 covers the state after
    step h and its hint line reports what that step changed across the whole
    dataset, not just the displayed rows.
    """
    rows = ", ".join(str(r) for r in selection.selected_row_ids)
    lines = [
        "# Caption template: write one caption per snapshot below its header.",
        "# Lines starting with '#' are hints and are ignored.",
        f"# Smallset rows: {rows}",
        "",
        "## snapshot 1",
        "# starting point; describe the data before any preprocessing",
        "",
    ]
    for diff in diffs:
        lines.append(f"## snapshot {diff.step + 1}")
        lines.append(f"# changes: {_step_hint(diff)}")
        lines.append("")
    return "\n".join(lines)


def parse_captions(text: str) -> CaptionSet:
    """Parse a caption file into per-snapshot texts.

    Sections must be numbered 1..S, each exactly once; anything before the
    first header is ignored.  Hint lines are stripped and a section's
    remaining lines are joined into one paragraph.  An empty caption is
    legal but draws a warning.

    Raises:
        MissingSection: a gap, duplicate, or bad start in the numbering.
    """
    sections: dict[int, list[str]] = {}
    current: list[str] | None = None
    for line in text.splitlines():
        match = _SECTION_RE.match(line.strip())
        if match:
            number = int(match.group(1))
            if number in sections:
                raise MissingSection(f"caption section {number} appears twice")
            current = sections.setdefault(number, [])
            continue
        if current is not None and not line.lstrip().startswith("#"):
            current.append(line.strip())
    if not sections:
        raise MissingSection("no '## snapshot N' sections found")
    count = max(sections)
    for expected in range(1, count + 1):
        if expected not in sections:
            raise MissingSection(f"caption section {expected} of {count} is missing")

    texts = []
    for number in range(1, count + 1):
        text_body = " ".join(part for part in sections[number] if part).strip()
        if not text_body:
            warnings.warn(
                f"caption for snapshot {number} is empty", SmalltimeWarning, stacklevel=2
            )
        texts.append(text_body)
    return CaptionSet(texts=tuple(texts))


@dataclass(frozen=True)
class AltText:
    """Structured alt text; render() yields the plain-text file content."""

    title: str
    snapshot_count: int
    legend_entries: tuple[tuple[str, str, str], ...]  # (code, change kind, color name)
    snapshot_blurbs: tuple[str, ...]

    def render(self) -> str:
        lines: list[str] = []
        lines.extend(_wrap_hard(self.title, ALT_LINE_WIDTH))
        lines.append("")
        lines.extend(
            _wrap_hard(
                f"A Smallset Timeline of {self.snapshot_count} snapshots showing how "
                "a dataset changes during preprocessing.",
                ALT_LINE_WIDTH,
            )
        )
        lines.append("")
        lines.append("Legend:")
        for _, kind, color in self.legend_entries:
            lines.extend(_wrap_hard(f"{color} marks {kind} data.", ALT_LINE_WIDTH))
        for number, blurb in enumerate(self.snapshot_blurbs, start=1):
            lines.append("")
            lines.extend(_wrap_hard(f"Snapshot {number}: {blurb}", ALT_LINE_WIDTH))
        return "\n".join(lines) + "\n"


def _wrap_hard(text: str, width: int) -> list[str]:
    # greedy wrap that also splits words longer than the width
    words: list[str] = []
    for word in text.split():
        while len(word) > width:
            words.append(word[:width])
            word = word[width:]
        words.append(word)
    lines: list[str] = []
    current = ""
    for word in words:
        trial = f"{current} {word}".strip()
        if len(trial) <= width or not current:
            current = trial
        else:
            lines.append(current)
            current = word
    if current or not lines:
        lines.append(current)
    return lines


def color_display_name(hex_color: str) -> str:
    name = _COLOR_NAMES.get(hex_color.upper())
    if name:
        return f"{name} ({hex_color.upper()})"
    return hex_color.upper()


def _sentence(text: str) -> str:
    text = " ".join(text.split())
    if text and text[-1] not in ".!?":
        text += "."
    return text


def generate_alt_text(
    spec: TimelineSpec,
    captions: CaptionSet | None = None,
    title: str = "Smallset Timeline",
) -> AltText:
    """Describe the rendered figure for readers who cannot see it.

    Counts are taken from the timeline's own frames, so they match the
    figure cell for cell: two deleted rows in the drawing means "2 rows
    deleted" here, whatever the full dataset lost.
    """
    texts = captions.texts if captions is not None else spec.captions
    if len(texts) != len(spec.snapshots):
        raise CaptionCountMismatch(
            f"{len(texts)} captions for {len(spec.snapshots)} snapshots"
        )

    legend = tuple(
        (code, LEGEND_LABELS[code], color_display_name(spec.palette.color(code)))
        for code in spec.codes_present()
    )

    blurbs = []
    for s, entry in enumerate(spec.snapshots):
        sentences = []
        if texts[s]:
            sentences.append(_sentence(texts[s]))
        if s == 0:
            table = entry.table
            sentences.append(
                f"Shows {_count_phrase(len(table.rows), 'row')} and "
                f"{_count_phrase(len(table.columns), 'column')}."
            )
        else:
            sentences.extend(_frame_changes(spec, s))
        blurbs.append(" ".join(sentences))
    return AltText(
        title=title,
        snapshot_count=len(spec.snapshots),
        legend_entries=legend,
        snapshot_blurbs=tuple(blurbs),
    )


def _frame_changes(spec: TimelineSpec, s: int) -> list[str]:
    prev = spec.snapshots[s - 1].table
    entry = spec.snapshots[s]
    table = entry.table
    out: list[str] = []

    deleted_rows = [rid for rid in prev.row_ids if rid not in table.id_set]
    if deleted_rows:
        out.append(f"{_count_phrase(len(deleted_rows), 'row')} deleted.")
    added_rows = [rid for rid in table.row_ids if rid not in prev.id_set]
    if added_rows:
        out.append(f"{_count_phrase(len(added_rows), 'row')} added.")
    for col in prev.columns:
        if col not in table.columns:
            out.append(f"Column {col} deleted.")
    for col in table.columns:
        if col not in prev.columns:
            out.append(f"Column {col} added.")
    edits: dict[str, int] = {}
    for (rid, col), code in entry.step_codes.items():
        if code == "E":
            edits[col] = edits.get(col, 0) + 1
    for col in spec.display_columns:
        if col in edits:
            out.append(f"{_count_phrase(edits[col], 'value')} edited in {col}.")
    if entry.resume_before:
        out.append("Resume marker before this snapshot.")
    if not out:
        out.append("No changes shown.")
    return out
