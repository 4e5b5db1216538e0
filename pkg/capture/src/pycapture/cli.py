"""Command line driver: run one marked script and dump its snapshots."""

from __future__ import annotations

import argparse
import sys

from .errors import CaptureError
from .runner import DEFAULT_NA_TOKEN, DEFAULT_ROWID_COLUMN, run_capture


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pycapture",
        description="Execute a preprocessing script with capture markers and "
        "write its snapshots plus a Timeline manifest.",
    )
    parser.add_argument("script", help="Python script containing capture markers")
    parser.add_argument("--out", required=True, help="output directory for snapshots and manifest")
    parser.add_argument(
        "--rowid-col",
        default=DEFAULT_ROWID_COLUMN,
        help=f"reserved row-id column name (default {DEFAULT_ROWID_COLUMN})",
    )
    parser.add_argument(
        "--na",
        default=DEFAULT_NA_TOKEN,
        help=f"token written for missing cells (default {DEFAULT_NA_TOKEN!r})",
    )
    args = parser.parse_args(argv)
    try:
        result = run_capture(args.script, args.out, rowid_col=args.rowid_col, na_token=args.na)
    except (CaptureError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.manifest_path} ({len(result.snapshot_paths)} snapshots)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
