"""Exception and warning types shared across the toolkit.

Every error raised on purpose by this package derives from SmalltimeError so
callers (and the command line driver) can catch one base class.
"""


class SmalltimeError(Exception):
    """Base class for all errors raised by this package."""


# ---- manifest and snapshot loading ----------------------------------------

class MalformedManifest(SmalltimeError):
    """Manifest JSON is missing fields, badly typed, or out of order."""


class VersionUnsupported(SmalltimeError):
    """Manifest declares a format version this build does not read."""


class MissingSnapshotFile(SmalltimeError):
    """A snapshot path listed in the manifest does not exist on disk."""


class MissingRowIdColumn(SmalltimeError):
    """Snapshot file lacks the reserved row-id column."""


class InvalidRowId(SmalltimeError):
    """Row-id cell does not parse as an integer."""


class DuplicateRowId(SmalltimeError):
    """Two records in one snapshot share a row id."""


class DuplicateColumn(SmalltimeError):
    """Snapshot header repeats a column name."""


class RaggedRow(SmalltimeError):
    """Record length differs from the header length."""


# ---- selection -------------------------------------------------------------

class KTooLarge(SmalltimeError):
    """Requested Smallset size exceeds the number of selectable rows."""


class InfeasibleK(SmalltimeError):
    """No K-row subset can cover every remaining preprocessing step."""


# ---- rendering -------------------------------------------------------------

class CaptionCountMismatch(SmalltimeError):
    """Number of captions differs from the number of snapshots."""


class UnknownColumnInSubset(SmalltimeError):
    """A requested display column never occurs in the snapshot sequence."""


class LayoutOverflow(SmalltimeError):
    """Figure width exceeds the configured maximum."""


# ---- captions --------------------------------------------------------------

class MissingSection(SmalltimeError):
    """Caption file lacks a numbered snapshot section."""


class SmalltimeWarning(UserWarning):
    """Category used for non-fatal advisories (uncovered steps, empty captions)."""
