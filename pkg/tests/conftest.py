"""Shared fixtures: a deterministic synthetic dataset and its pipeline.

The synthetic dataset is 100 rows by 8 columns: a category (C1), a boolean
keep-flag (C2), two small integers (C3, C4), and four continuous columns of
which C6, C7, C8 have missing values (14, 44, and 19 cells).  The reference
pipeline filters on C2, imputes C6/C8 with per-category means while dropping
C7, then adds C9 = C3 + C4.

Everything here is computed with plain stdlib code, independently of the
package under test, so expected values in tests are genuine oracles.  The
snapshot CSV and manifest files are likewise written by hand.
"""

from __future__ import annotations

import csv
import json
import random
import statistics
from pathlib import Path

import pytest

FIXTURE_SEED = 20

COLUMNS = ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8"]


class SyntheticData:
    def __init__(self, seed: int = FIXTURE_SEED):
        rng = random.Random(seed)
        self.ids = list(range(1, 101))
        self.false_ids = set(rng.sample(self.ids, 30))
        self.miss6 = set(rng.sample(self.ids, 14))
        self.miss7 = set(rng.sample(self.ids, 44))
        self.miss8 = set(rng.sample(self.ids, 19))
        self.values = {}
        for rid in self.ids:
            self.values[rid] = {
                "C1": rng.choice("abcd"),
                "C2": rid not in self.false_ids,
                "C3": rng.randrange(10),
                "C4": rng.randrange(10),
                "C5": round(rng.uniform(0, 100), 4),
                "C6": None if rid in self.miss6 else round(rng.uniform(0, 50), 4),
                "C7": None if rid in self.miss7 else round(rng.uniform(0, 1), 4),
                "C8": None if rid in self.miss8 else round(rng.uniform(0, 200), 4),
            }
        self.survivors = [rid for rid in self.ids if rid not in self.false_ids]
        self._check_shape()

    def _check_shape(self):
        # the fixture must exercise all four survivor change patterns
        surv = set(self.survivors)
        assert surv & self.miss6 & self.miss8, "need a survivor missing both C6 and C8"
        assert surv & self.miss6 - self.miss8, "need a survivor missing C6 only"
        assert surv & self.miss8 - self.miss6, "need a survivor missing C8 only"
        assert surv - self.miss6 - self.miss8, "need an untouched survivor"
        for cat in "abcd":
            members = [r for r in self.survivors if self.values[r]["C1"] == cat]
            assert any(r not in self.miss6 for r in members)
            assert any(r not in self.miss8 for r in members)

    def frames(self):
        """The four pipeline snapshots as (columns, rows) with rows id->value."""
        frame0 = (list(COLUMNS), {rid: dict(self.values[rid]) for rid in self.ids})
        frame1 = (list(COLUMNS), {rid: dict(self.values[rid]) for rid in self.survivors})

        means6 = self._group_means("C6")
        means8 = self._group_means("C8")
        cols2 = [c for c in COLUMNS if c != "C7"]
        frame2_rows = {}
        for rid in self.survivors:
            row = {c: self.values[rid][c] for c in cols2}
            if row["C6"] is None:
                row["C6"] = means6[self.values[rid]["C1"]]
            if row["C8"] is None:
                row["C8"] = means8[self.values[rid]["C1"]]
            frame2_rows[rid] = row
        frame2 = (cols2, frame2_rows)

        cols3 = cols2 + ["C9"]
        frame3_rows = {
            rid: {**row, "C9": row["C3"] + row["C4"]} for rid, row in frame2_rows.items()
        }
        frame3 = (cols3, frame3_rows)
        return [frame0, frame1, frame2, frame3]

    def _group_means(self, column):
        out = {}
        for cat in "abcd":
            pool = [
                self.values[r][column]
                for r in self.survivors
                if self.values[r]["C1"] == cat and self.values[r][column] is not None
            ]
            out[cat] = statistics.mean(pool)
        return out

    def expected_appearance(self, rid: int) -> tuple[str, ...]:
        """Final change codes per column C1..C9 for an original row."""
        if rid in self.false_ids:
            return ("D",) * 9
        return (
            "U", "U", "U", "U", "U",
            "E" if rid in self.miss6 else "U",
            "D",
            "E" if rid in self.miss8 else "U",
            "A",
        )

    def expected_coverage(self, rid: int) -> tuple[int, int, int]:
        return (1, 0, 0) if rid in self.false_ids else (0, 1, 1)


def format_fixture_cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_sequence(target: Path, data: SyntheticData, resume_at: int | None = None) -> Path:
    """Write the four snapshot CSVs and a manifest; returns the manifest path."""
    labels = ["start", "filtered", "imputed", "final"]
    entries = []
    for index, (columns, rows) in enumerate(data.frames()):
        name = f"snap_{index}.csv"
        with open(target / name, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["__rowid__", *columns])
            for rid in sorted(rows):
                writer.writerow([str(rid), *(format_fixture_cell(rows[rid][c]) for c in columns)])
        entries.append(
            {
                "index": index,
                "label": labels[index],
                "path": name,
                "resume_before": index == resume_at,
            }
        )
    manifest_path = target / "manifest.json"
    manifest_path.write_text(
        json.dumps(
            {
                "version": 1,
                "rowid_column": "__rowid__",
                "na_tokens": ["", "NA"],
                "snapshots": entries,
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    return manifest_path


@pytest.fixture(scope="session")
def synthetic() -> SyntheticData:
    return SyntheticData()


@pytest.fixture(scope="session")
def synthetic_manifest(tmp_path_factory, synthetic) -> Path:
    target = tmp_path_factory.mktemp("synthetic")
    return write_sequence(target, synthetic)


@pytest.fixture(scope="session")
def synthetic_resume_manifest(tmp_path_factory, synthetic) -> Path:
    target = tmp_path_factory.mktemp("synthetic_resume")
    return write_sequence(target, synthetic, resume_at=2)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
