"""Locate and validate capture markers in a script.

A marker is a whole-line comment naming one of four actions and the tracked
variable, e.g. ``# snap mydata``.  The actions are spelled exactly
``start smallset``, ``snap``, ``resume``, ``end smallset``.  A comment
trailing code on the same line is never a marker, and every marker in one
script must name the same variable: capture follows a single table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MixedVariables, NoEndMarker, NoStartMarker, OutOfOrderMarker

START = "start_smallset"
SNAP = "snap"
RESUME = "resume"
END = "end_smallset"

SPELLING = {START: "start smallset", SNAP: "snap", RESUME: "resume", END: "end smallset"}

_MARKER_RE = re.compile(
    r"#\s*(start smallset|end smallset|snap|resume)\s+([A-Za-z_][A-Za-z0-9_]*)\s*\Z"
)


@dataclass(frozen=True)
class MarkerDirective:
    """One recognized marker comment.

    ``action`` is one of the module constants START/SNAP/RESUME/END and
    ``line`` is the 1-based line the comment occupies.
    """

    action: str
    variable: str
    line: int


def parse_markers(script: str) -> list[MarkerDirective]:
    """Scan script text and return its validated marker list.

    Grammar: the first marker is ``start smallset``, the last is
    ``end smallset``, ``resume`` only appears after some ``snap``, and no
    marker follows the end.  Violations raise NoStartMarker, NoEndMarker,
    OutOfOrderMarker, or MixedVariables.
    """
    found: list[MarkerDirective] = []
    for lineno, text in enumerate(script.splitlines(), start=1):
        stripped = text.strip()
        if not stripped.startswith("#"):
            continue
        match = _MARKER_RE.match(stripped)
        if match is None:
            continue
        action = match.group(1).replace(" ", "_")
        found.append(MarkerDirective(action=action, variable=match.group(2), line=lineno))

    if not any(m.action == START for m in found):
        raise NoStartMarker("no '# start smallset <variable>' marker in the script")
    if not any(m.action == END for m in found):
        raise NoEndMarker("no '# end smallset <variable>' marker in the script")

    names = sorted({m.variable for m in found})
    if len(names) > 1:
        raise MixedVariables(f"markers track more than one variable: {', '.join(names)}")

    first, last = found[0], found[-1]
    if first.action != START:
        raise OutOfOrderMarker(
            f"line {first.line}: '{SPELLING[first.action]}' before 'start smallset'"
        )
    if last.action != END:
        raise OutOfOrderMarker(
            f"line {last.line}: '{SPELLING[last.action]}' after 'end smallset'"
        )
    seen_snap = False
    for m in found[1:-1]:
        if m.action == START:
            raise OutOfOrderMarker(f"line {m.line}: 'start smallset' appears twice")
        if m.action == END:
            raise OutOfOrderMarker(f"line {m.line}: 'end smallset' is not the last marker")
        if m.action == RESUME and not seen_snap:
            raise OutOfOrderMarker(f"line {m.line}: 'resume' before any 'snap'")
        if m.action == SNAP:
            seen_snap = True
    return found
