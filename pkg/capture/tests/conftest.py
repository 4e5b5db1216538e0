"""Shared helpers: script scaffolding and driving the Timeline toolchain.

The capture shim talks to the rendering side only through files and its
command line, so every cross-package check here shells out rather than
importing it.
"""

from __future__ import annotations

import subprocess
import sys
import textwrap
from pathlib import Path


def write_script(path: Path, body: str) -> Path:
    path.write_text(textwrap.dedent(body).lstrip("\n"), encoding="utf-8")
    return path


def run_timeline(*argv, cwd):
    return subprocess.run(
        [sys.executable, "-m", "smalltime", *argv],
        cwd=cwd,
        capture_output=True,
        text=True,
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
