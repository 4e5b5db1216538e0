"""Command line driver.

Subcommands: check, template, select, dump-matrices, render.  Every setting
can also come from a JSON config file (--config); explicit flags win over
the file, the file wins over built-in defaults.  Set SMALLTIME_NO_COLOR to
disable ANSI styling of warnings and errors.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import warnings
from pathlib import Path

from .diffing import build_appearance, build_coverage, build_distance, diff_sequence, matrices_to_dict
from .errors import SmalltimeError
from .narrative import emit_caption_template, generate_alt_text, parse_captions
from .render import Palette, RenderOptions, build_timeline, render_svg
from .selection import (
    SelectorConfig,
    select_coverage,
    select_coverage_variety,
    select_random,
)
from .tables import load_all, load_manifest, validate_sequence

DEFAULTS = {
    "strict": False,
    "epsilon": 0.0,
    "k": 5,
    "method": "coverage_variety",
    "seed": 0,
    "exhaustive_limit": 2_000_000,
    "out": "captions.txt",
    "captions": None,
    "output_stem": "smallset_timeline",
    "title": None,
    "ghost": True,
    "print_data": True,
    "tints": True,
    "columns": None,
    "rows_per_band": 10,
    "max_added_rows": 2,
    "sig_digits": 4,
    "max_text_chars": 10,
    "font_size": 8.0,
    "cell_w": 40.0,
    "cell_h": 13.0,
    "max_width": None,
    "color_unchanged": "#E6E6E6",
    "color_edited": "#E69F00",
    "color_added": "#009E73",
    "color_deleted": "#D55E00",
    "tint_lighten": 0.45,
}

_HEX_RE = re.compile(r"#[0-9A-Fa-f]{6}\Z")


def _hex_color(value: str) -> str:
    if not _HEX_RE.match(value):
        raise argparse.ArgumentTypeError(f"{value!r} is not a #RRGGBB color")
    return value


def _use_color() -> bool:
    if os.environ.get("SMALLTIME_NO_COLOR"):
        return False
    return hasattr(sys.stderr, "isatty") and sys.stderr.isatty()


def _warn_line(message: str) -> None:
    if _use_color():
        print(f"\x1b[33mwarning:\x1b[0m {message}", file=sys.stderr)
    else:
        print(f"warning: {message}", file=sys.stderr)


def _error_line(message: str) -> None:
    if _use_color():
        print(f"\x1b[31merror:\x1b[0m {message}", file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smalltime",
        description="Build Smallset Timeline figures from recorded preprocessing snapshots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("manifest", help="path to the snapshot manifest JSON")
        p.add_argument("--config", help="JSON file with defaults for any flag", default=None)
        p.add_argument("--strict", action="store_const", const=True, default=None,
                       help="reject unknown manifest fields")
        p.add_argument("--epsilon", type=float, default=None,
                       help="numeric tolerance when comparing cells (default exact)")

    def selector(p: argparse.ArgumentParser) -> None:
        p.add_argument("--k", type=int, default=None, help="Smallset size")
        p.add_argument("--method", default=None,
                       choices=["random", "coverage", "coverage_variety"])
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--exhaustive-limit", type=int, default=None, dest="exhaustive_limit",
                       help="max candidate subsets for the exact variety search")

    p_check = sub.add_parser("check", help="validate a manifest and its snapshots")
    common(p_check)

    p_template = sub.add_parser("template", help="write a caption template file")
    common(p_template)
    selector(p_template)
    p_template.add_argument("--out", default=None, help="where to write the template")

    p_select = sub.add_parser("select", help="pick Smallset rows and print the result as JSON")
    common(p_select)
    selector(p_select)

    p_dump = sub.add_parser("dump-matrices", help="print coverage and appearance matrices as JSON")
    common(p_dump)

    p_render = sub.add_parser("render", help="render the figure and its alt text")
    common(p_render)
    selector(p_render)
    p_render.add_argument("--captions", default=None, help="caption file (default <stem>.captions.txt)")
    p_render.add_argument("--output-stem", default=None, dest="output_stem")
    p_render.add_argument("--title", default=None)
    p_render.add_argument("--ghost", action="store_const", const=True, default=None, dest="ghost")
    p_render.add_argument("--no-ghost", action="store_const", const=False, dest="ghost")
    p_render.add_argument("--print-data", action="store_const", const=True, default=None, dest="print_data")
    p_render.add_argument("--no-print-data", action="store_const", const=False, dest="print_data")
    p_render.add_argument("--tints", action="store_const", const=True, default=None, dest="tints")
    p_render.add_argument("--no-tints", action="store_const", const=False, dest="tints")
    p_render.add_argument("--columns", default=None, help="comma-separated columns to display")
    p_render.add_argument("--rows-per-band", type=int, default=None, dest="rows_per_band",
                          help="snapshots per horizontal band")
    p_render.add_argument("--max-added-rows", type=int, default=None, dest="max_added_rows")
    p_render.add_argument("--sig-digits", type=int, default=None, dest="sig_digits")
    p_render.add_argument("--max-text-chars", type=int, default=None, dest="max_text_chars")
    p_render.add_argument("--font-size", type=float, default=None, dest="font_size")
    p_render.add_argument("--cell-w", type=float, default=None, dest="cell_w")
    p_render.add_argument("--cell-h", type=float, default=None, dest="cell_h")
    p_render.add_argument("--max-width", type=float, default=None, dest="max_width")
    p_render.add_argument("--color-unchanged", type=_hex_color, default=None, dest="color_unchanged")
    p_render.add_argument("--color-edited", type=_hex_color, default=None, dest="color_edited")
    p_render.add_argument("--color-added", type=_hex_color, default=None, dest="color_added")
    p_render.add_argument("--color-deleted", type=_hex_color, default=None, dest="color_deleted")
    p_render.add_argument("--tint-lighten", type=float, default=None, dest="tint_lighten")
    return parser


class _Settings:
    """Flag > config file > default, looked up by flag dest name."""

    def __init__(self, args: argparse.Namespace):
        self.args = vars(args)
        self.config = {}
        config_path = self.args.get("config")
        if config_path:
            try:
                self.config = json.loads(Path(config_path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise SmalltimeError(f"cannot read config {config_path}: {exc}") from exc
            if not isinstance(self.config, dict):
                raise SmalltimeError(f"config {config_path} must be a JSON object")

    def get(self, name: str):
        value = self.args.get(name)
        if value is not None:
            return value
        if name in self.config:
            return self.config[name]
        return DEFAULTS[name]


def _selector_config(opts: _Settings) -> SelectorConfig:
    return SelectorConfig(
        k=opts.get("k"),
        method=opts.get("method"),
        seed=opts.get("seed"),
        exhaustive_limit=opts.get("exhaustive_limit"),
    )


def _select(coverage, distance, cfg: SelectorConfig):
    if cfg.method == "random":
        return select_random(coverage, cfg)
    if cfg.method == "coverage":
        return select_coverage(coverage, cfg)
    if cfg.method == "coverage_variety":
        return select_coverage_variety(coverage, distance, cfg)
    raise SmalltimeError(f"unknown selection method {cfg.method!r}")


def _load_sequence(opts: _Settings):
    manifest = load_manifest(opts.get("manifest"), strict=opts.get("strict"))
    tables = load_all(manifest)
    return manifest, tables


def _step_labels(tables) -> list[str]:
    return [
        table.label if table.label else f"step {i}"
        for i, table in enumerate(tables[1:], start=1)
    ]


def cmd_check(opts: _Settings) -> int:
    manifest, tables = _load_sequence(opts)
    print(f"manifest: {len(tables)} snapshots, rowid column {manifest.rowid_column!r}")
    for i, table in enumerate(tables, start=1):
        print(f"snapshot {i} {table.label!r}: {len(table.rows)} rows, {len(table.columns)} columns")
    diffs = diff_sequence(tables, epsilon=opts.get("epsilon"))
    for diff in diffs:
        print(
            f"step {diff.step}: "
            f"-{len(diff.rows_deleted)}/+{len(diff.rows_added)} rows, "
            f"-{len(diff.cols_deleted)}/+{len(diff.cols_added)} columns, "
            f"{len(diff.cells_edited)} cells edited"
        )
    for advisory in validate_sequence(tables):
        _warn_line(advisory.message)
    print("ok")
    return 0


def cmd_template(opts: _Settings) -> int:
    _, tables = _load_sequence(opts)
    diffs = diff_sequence(tables, epsilon=opts.get("epsilon"))
    coverage = build_coverage(diffs, tables[0])
    appearance = build_appearance(diffs, tables[0])
    distance = build_distance(appearance)
    selection = _select(coverage, distance, _selector_config(opts))
    out = Path(opts.get("out"))
    out.write_text(emit_caption_template(diffs, selection), encoding="utf-8")
    print(f"wrote {out}")
    return 0


def cmd_select(opts: _Settings) -> int:
    _, tables = _load_sequence(opts)
    diffs = diff_sequence(tables, epsilon=opts.get("epsilon"))
    coverage = build_coverage(diffs, tables[0])
    appearance = build_appearance(diffs, tables[0])
    distance = build_distance(appearance)
    selection = _select(coverage, distance, _selector_config(opts))
    print(json.dumps(selection.to_dict(), indent=2))
    return 0


def cmd_dump_matrices(opts: _Settings) -> int:
    _, tables = _load_sequence(opts)
    diffs = diff_sequence(tables, epsilon=opts.get("epsilon"))
    coverage = build_coverage(diffs, tables[0])
    appearance = build_appearance(diffs, tables[0])
    print(json.dumps(matrices_to_dict(coverage, appearance, _step_labels(tables)), indent=2))
    return 0


def cmd_render(opts: _Settings) -> int:
    _, tables = _load_sequence(opts)
    diffs = diff_sequence(tables, epsilon=opts.get("epsilon"))
    coverage = build_coverage(diffs, tables[0])
    appearance = build_appearance(diffs, tables[0])
    distance = build_distance(appearance)
    selection = _select(coverage, distance, _selector_config(opts))

    stem = opts.get("output_stem")
    caption_path = opts.get("captions") or f"{stem}.captions.txt"
    try:
        caption_text = Path(caption_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SmalltimeError(
            f"cannot read captions {caption_path}: {exc} "
            "(generate one with the template subcommand)"
        ) from exc
    captions = parse_captions(caption_text)

    columns = opts.get("columns")
    if isinstance(columns, str):
        columns = tuple(c.strip() for c in columns.split(",") if c.strip())
    elif isinstance(columns, list):
        columns = tuple(columns)

    options = RenderOptions(
        ghost=opts.get("ghost"),
        print_data=opts.get("print_data"),
        tints=opts.get("tints"),
        columns=columns,
        rows_per_band=opts.get("rows_per_band"),
        max_added_rows=opts.get("max_added_rows"),
        sig_digits=opts.get("sig_digits"),
        max_text_chars=opts.get("max_text_chars"),
        font_size=opts.get("font_size"),
        cell_w=opts.get("cell_w"),
        cell_h=opts.get("cell_h"),
        max_width=opts.get("max_width"),
    )
    palette = Palette(
        unchanged=opts.get("color_unchanged"),
        edited=opts.get("color_edited"),
        added=opts.get("color_added"),
        deleted=opts.get("color_deleted"),
        tint_lighten=opts.get("tint_lighten"),
    )

    spec = build_timeline(tables, diffs, selection, list(captions.texts), palette, options)
    svg = render_svg(spec)
    title = opts.get("title") or Path(stem).name
    alt = generate_alt_text(spec, captions, title=title)

    svg_path = Path(f"{stem}.svg")
    alt_path = Path(f"{stem}.alt.txt")
    svg_path.write_text(svg, encoding="utf-8")
    alt_path.write_text(alt.render(), encoding="utf-8")

    rows = ", ".join(str(r) for r in selection.selected_row_ids)
    flag = " (heuristic)" if selection.heuristic else ""
    print(f"selection: method={selection.method} rows=[{rows}] objective={selection.objective_value}{flag}")
    if selection.dropped_steps:
        print(f"dropped steps: {list(selection.dropped_steps)}")
    print(f"wrote {svg_path}")
    print(f"wrote {alt_path}")
    return 0


_COMMANDS = {
    "check": cmd_check,
    "template": cmd_template,
    "select": cmd_select,
    "dump-matrices": cmd_dump_matrices,
    "render": cmd_render,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _Settings(args)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = _COMMANDS[args.command](opts)
        for item in caught:
            _warn_line(str(item.message))
        return code
    except SmalltimeError as exc:
        _error_line(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
