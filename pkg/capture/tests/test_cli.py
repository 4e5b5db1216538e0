"""Command line driver behavior."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import write_script
from pycapture.cli import main

OK_SCRIPT = """
import pandas as pd

df = pd.DataFrame({"x": [1, 2], "y": [0.5, None]})
# start smallset df
df["x"] = df["x"] + 1
# end smallset df
"""


def test_successful_run(tmp_path, capsys):
    script = write_script(tmp_path / "job.py", OK_SCRIPT)
    out = tmp_path / "captured"
    assert main([str(script), "--out", str(out)]) == 0
    captured = capsys.readouterr()
    assert captured.out == f"wrote {out / 'manifest.json'} (2 snapshots)\n"
    assert captured.err == ""
    manifest = json.loads((out / "manifest.json").read_text())
    assert [e["label"] for e in manifest["snapshots"]] == ["start", "end"]


def test_missing_script(tmp_path, capsys):
    assert main([str(tmp_path / "absent.py"), "--out", str(tmp_path / "o")]) == 1
    captured = capsys.readouterr()
    assert captured.err.startswith("error: cannot read script")
    assert captured.out == ""


def test_marker_error_reports_and_fails(tmp_path, capsys):
    script = write_script(tmp_path / "job.py", "x = 1\n")
    assert main([str(script), "--out", str(tmp_path / "o")]) == 1
    captured = capsys.readouterr()
    assert captured.err == "error: no '# start smallset <variable>' marker in the script\n"


def test_script_error_reports_line_range(tmp_path, capsys):
    script = write_script(tmp_path / "job.py", """
        import pandas as pd

        df = pd.DataFrame({"x": [1]})
        # start smallset df
        boom = 1 / 0
        # end smallset df
    """)
    assert main([str(script), "--out", str(tmp_path / "o")]) == 1
    captured = capsys.readouterr()
    assert captured.err == "error: lines 5-5: ZeroDivisionError: division by zero\n"


def test_rowid_and_na_flags(tmp_path, capsys):
    script = write_script(tmp_path / "job.py", OK_SCRIPT)
    out = tmp_path / "captured"
    assert main([str(script), "--out", str(out), "--rowid-col", "rid", "--na", "?"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["rowid_column"] == "rid"
    assert manifest["na_tokens"] == ["?"]
    assert (out / "snap_0.csv").read_text() == "rid,x,y\n0,1,0.5\n1,2,?\n"


def test_out_flag_is_required(tmp_path, capsys):
    with pytest.raises(SystemExit) as err:
        main([str(tmp_path / "job.py")])
    assert err.value.code == 2


def test_module_invocation(tmp_path):
    script = write_script(tmp_path / "job.py", OK_SCRIPT)
    result = subprocess.run(
        [sys.executable, "-m", "pycapture", str(script), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert result.stdout.startswith("wrote ")
    assert (tmp_path / "o" / "snap_1.csv").exists()
