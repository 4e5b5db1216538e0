"""Smallset Timelines for documenting data preprocessing.

Record snapshots of a table as a preprocessing pipeline runs, then build a
static figure that shows a small, carefully chosen set of rows (a Smallset)
evolving step by step, with color-coded changes, captions, and alt text.
"""

from .diffing import (
    AppearanceMatrix,
    CoverageMatrix,
    DistanceMatrix,
    StepDiff,
    build_appearance,
    build_coverage,
    build_distance,
    diff_sequence,
    diff_step,
    edits_by_column,
    matrices_to_dict,
)
from .errors import (
    CaptionCountMismatch,
    DuplicateColumn,
    DuplicateRowId,
    InfeasibleK,
    InvalidRowId,
    KTooLarge,
    LayoutOverflow,
    MalformedManifest,
    MissingRowIdColumn,
    MissingSection,
    MissingSnapshotFile,
    RaggedRow,
    SmalltimeError,
    SmalltimeWarning,
    UnknownColumnInSubset,
    VersionUnsupported,
)
from .narrative import (
    AltText,
    CaptionSet,
    emit_caption_template,
    generate_alt_text,
    parse_captions,
)
from .render import (
    CellRect,
    Palette,
    RenderOptions,
    SnapshotEntry,
    TimelineSpec,
    build_timeline,
    format_value,
    layout_geometry,
    render_svg,
)
from .selection import (
    SelectorConfig,
    SmallsetSelection,
    SplitMix64,
    select_coverage,
    select_coverage_variety,
    select_random,
)
from .tables import (
    CaptureManifest,
    Cell,
    ManifestEntry,
    SequenceWarning,
    SnapshotTable,
    TableRow,
    cells_equal,
    format_cell,
    load_all,
    load_manifest,
    load_snapshot,
    parse_cell,
    validate_sequence,
    write_snapshot,
)

__version__ = "0.1.0"
