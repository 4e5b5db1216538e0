"""Caption template and parser, plus generated alt text."""

from __future__ import annotations

import pytest

from smalltime import (
    CaptionCountMismatch,
    MissingSection,
    Palette,
    RenderOptions,
    SelectorConfig,
    SmalltimeWarning,
    SmallsetSelection,
    SnapshotTable,
    TableRow,
    build_appearance,
    build_coverage,
    build_distance,
    build_timeline,
    diff_sequence,
    diff_step,
    emit_caption_template,
    generate_alt_text,
    load_all,
    load_manifest,
    parse_captions,
    select_coverage_variety,
)
from smalltime.narrative import ALT_LINE_WIDTH, color_display_name


def mk(columns, rows, label="", resume=False):
    return SnapshotTable(
        columns=tuple(columns),
        rows=tuple(TableRow(rid, tuple(cells)) for rid, cells in rows),
        label=label,
        resume_before=resume,
    )


def pick(row_ids, universe):
    ids = tuple(sorted(row_ids))
    return SmallsetSelection(
        selected_row_ids=ids,
        z=tuple(1 if rid in ids else 0 for rid in universe),
        method="coverage",
        objective_value=0,
        seed=None,
        dropped_steps=(),
    )


def fixture_parts(manifest_path, captions=None):
    tables = load_all(load_manifest(manifest_path))
    diffs = diff_sequence(tables)
    coverage = build_coverage(diffs, tables[0])
    distance = build_distance(build_appearance(diffs, tables[0]))
    selection = select_coverage_variety(coverage, distance, SelectorConfig(k=5, seed=0))
    if captions is None:
        captions = ["the raw data", "kept the C2 rows", "filled the blanks", "derived C9"]
    spec = build_timeline(tables, diffs, selection, captions)
    return tables, diffs, selection, spec


# ---- template --------------------------------------------------------------

def test_template_layout(synthetic, synthetic_manifest):
    tables, diffs, selection, _ = fixture_parts(synthetic_manifest)
    text = emit_caption_template(diffs, selection)
    lines = text.splitlines()
    assert "# Smallset rows: 1, 4, 5, 8, 26" in lines
    for number in range(1, 5):
        assert f"## snapshot {number}" in lines

    surv = set(synthetic.survivors)
    n6 = len(surv & synthetic.miss6)
    n8 = len(surv & synthetic.miss8)
    assert "# changes: 30 rows deleted" in lines
    assert (
        f"# changes: column C7 deleted; {n6 + n8} cells edited ({n6} in C6, {n8} in C8)"
        in lines
    )
    assert "# changes: column C9 added" in lines


def test_template_zero_change_hint():
    tables = [mk(["x"], [(1, [1])]), mk(["x"], [(1, [1])])]
    text = emit_caption_template(diff_sequence(tables), pick([1], (1,)))
    assert "# changes: no changes detected (0 rows affected)" in text.splitlines()


def test_template_singular_phrasing():
    a = mk(["x", "y"], [(1, [1, 2]), (2, [3, 4])])
    b = mk(["x", "y"], [(1, [1, 9])])
    hint_line = [
        line
        for line in emit_caption_template([diff_step(a, b, 1)], pick([1, 2], (1, 2))).splitlines()
        if line.startswith("# changes:")
    ][0]
    assert hint_line == "# changes: 1 row deleted; 1 cell edited (1 in y)"


def test_template_parses_back_with_empty_caption_warnings(synthetic_manifest):
    import warnings

    _, diffs, selection, _ = fixture_parts(synthetic_manifest)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        captions = parse_captions(emit_caption_template(diffs, selection))
    assert captions.texts == ("", "", "", "")
    messages = [str(w.message) for w in caught if issubclass(w.category, SmalltimeWarning)]
    assert messages == [f"caption for snapshot {n} is empty" for n in range(1, 5)]


# ---- parser ----------------------------------------------------------------

def test_parse_joins_lines_and_strips_hints():
    text = """
preamble chatter is ignored

## snapshot 1
# hint line
First line
  continues here.

## Snapshot 2
all lowercase header also works
"""
    captions = parse_captions(text)
    assert captions.texts == ("First line continues here.", "all lowercase header also works")


def test_parse_rejects_duplicates():
    text = "## snapshot 1\na\n## snapshot 1\nb\n"
    with pytest.raises(MissingSection, match="appears twice"):
        parse_captions(text)


def test_parse_rejects_gaps():
    text = "## snapshot 1\na\n## snapshot 3\nc\n"
    with pytest.raises(MissingSection, match="section 2 of 3 is missing"):
        parse_captions(text)


def test_parse_rejects_missing_first_section():
    text = "## snapshot 2\nb\n## snapshot 3\nc\n"
    with pytest.raises(MissingSection, match="section 1 of 3 is missing"):
        parse_captions(text)


def test_parse_requires_sections():
    with pytest.raises(MissingSection, match="no '## snapshot N' sections"):
        parse_captions("just prose, no headers\n")


def test_parse_warns_on_empty_section():
    text = "## snapshot 1\nwords\n## snapshot 2\n# only a hint\n"
    with pytest.warns(SmalltimeWarning, match="snapshot 2 is empty"):
        captions = parse_captions(text)
    assert captions.texts == ("words", "")


# ---- alt text --------------------------------------------------------------

def test_alt_text_layout(synthetic_manifest):
    _, _, _, spec = fixture_parts(synthetic_manifest)
    alt = generate_alt_text(spec)
    text = alt.render()
    lines = text.splitlines()

    assert lines[0] == "Smallset Timeline"
    assert lines[1] == ""
    assert lines[2] == (
        "A Smallset Timeline of 4 snapshots showing how a dataset changes during preprocessing."
    )
    assert lines[3] == ""
    assert lines[4] == "Legend:"
    assert lines[5] == "light gray (#E6E6E6) marks unchanged data."
    assert lines[6] == "orange (#E69F00) marks edited data."
    assert lines[7] == "bluish green (#009E73) marks added data."
    assert lines[8] == "vermilion (#D55E00) marks deleted data."
    assert all(len(line) <= ALT_LINE_WIDTH for line in lines)
    assert text.endswith("\n")


def test_alt_text_blurbs_describe_the_displayed_rows(synthetic_manifest):
    _, _, _, spec = fixture_parts(synthetic_manifest)
    blocks = generate_alt_text(spec).render().rstrip("\n").split("\n\n")
    snap = {i: blocks[2 + i] for i in range(1, 5)}

    # caption text flows in verbatim, followed by figure-level counts
    assert snap[1] == "Snapshot 1: the raw data. Shows 5 rows and 8 columns."
    # two of the five displayed rows are deleted, not the dataset's thirty
    assert snap[2] == "Snapshot 2: kept the C2 rows. 2 rows deleted."
    assert snap[3] == (
        "Snapshot 3: filled the blanks. Column C7 deleted. "
        "1 value edited in C6. 1 value edited in C8."
    )
    assert snap[4] == "Snapshot 4: derived C9. Column C9 added."


def test_alt_text_counts_match_restricted_diffs(synthetic_manifest):
    # what the text claims must equal a diff of the restricted tables
    import re

    _, _, _, spec = fixture_parts(synthetic_manifest)
    blocks = generate_alt_text(spec).render().rstrip("\n").split("\n\n")
    for s in range(1, len(spec.snapshots)):
        diff = diff_step(spec.snapshots[s - 1].table, spec.snapshots[s].table, s)
        blurb = blocks[2 + s + 1]  # snapshot number is s + 1
        stated_deleted = re.search(r"(\d+) rows? deleted", blurb)
        assert (int(stated_deleted.group(1)) if stated_deleted else 0) == len(diff.rows_deleted)
        stated_edits = sum(int(n) for n in re.findall(r"(\d+) values? edited", blurb))
        assert stated_edits == len(diff.cells_edited)
        for col in diff.cols_deleted:
            assert f"Column {col} deleted." in blurb
        for col in diff.cols_added:
            assert f"Column {col} added." in blurb


def test_alt_text_legend_follows_codes_present():
    tables = [
        mk(["x", "y"], [(1, [1, 2]), (2, [3, 4])]),
        mk(["x", "y"], [(1, [1, 9])]),
    ]
    spec = build_timeline(tables, diff_sequence(tables), pick([1, 2], (1, 2)), ["a", "b"])
    alt = generate_alt_text(spec)
    assert [code for code, _, _ in alt.legend_entries] == ["U", "E", "D"]
    rendered = alt.render()
    assert "added data" not in rendered


def test_alt_text_no_change_and_resume():
    tables = [
        mk(["x"], [(1, [1])], label="one"),
        mk(["x"], [(1, [1])], label="two", resume=True),
    ]
    spec = build_timeline(tables, diff_sequence(tables), pick([1], (1,)), ["", ""])
    blocks = generate_alt_text(spec).render().rstrip("\n").split("\n\n")
    assert blocks[4] == "Snapshot 2: Resume marker before this snapshot."

    plain = [mk(["x"], [(1, [1])]), mk(["x"], [(1, [1])])]
    spec = build_timeline(plain, diff_sequence(plain), pick([1], (1,)), ["", ""])
    blocks = generate_alt_text(spec).render().rstrip("\n").split("\n\n")
    assert blocks[4] == "Snapshot 2: No changes shown."


def test_alt_text_respects_caption_override(synthetic_manifest):
    _, _, _, spec = fixture_parts(synthetic_manifest)
    from smalltime import CaptionSet

    override = CaptionSet(texts=("a", "b", "c", "d"))
    alt = generate_alt_text(spec, captions=override)
    assert "Snapshot 1: a." in alt.render()
    with pytest.raises(CaptionCountMismatch):
        generate_alt_text(spec, captions=CaptionSet(texts=("a", "b")))


def test_alt_text_hard_wraps_long_words():
    tables = [mk(["x"], [(1, [1])]), mk(["x"], [(1, [1])])]
    monster = "x" * 250
    spec = build_timeline(tables, diff_sequence(tables), pick([1], (1,)), [monster, ""])
    lines = generate_alt_text(spec).render().splitlines()
    assert all(len(line) <= ALT_LINE_WIDTH for line in lines)
    assert sum(line.count("x") for line in lines) == 250


def test_color_display_names():
    assert color_display_name("#E6E6E6") == "light gray (#E6E6E6)"
    assert color_display_name("#e69f00") == "orange (#E69F00)"
    assert color_display_name("#123456") == "#123456"


def test_alt_text_custom_palette_falls_back_to_hex(synthetic_manifest):
    tables = load_all(load_manifest(synthetic_manifest))
    diffs = diff_sequence(tables)
    coverage = build_coverage(diffs, tables[0])
    distance = build_distance(build_appearance(diffs, tables[0]))
    selection = select_coverage_variety(coverage, distance, SelectorConfig(k=5, seed=0))
    spec = build_timeline(
        tables, diffs, selection, ["a", "b", "c", "d"],
        palette=Palette(edited="#ABCDEF"),
    )
    rendered = generate_alt_text(spec).render()
    assert "#ABCDEF marks edited data." in rendered
