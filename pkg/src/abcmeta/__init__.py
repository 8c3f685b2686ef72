from ._batch import (
    BatchOptions,
    ReportRow,
    StudyRow,
    make_record,
    read_batch,
    run_batch,
    run_study,
    write_report,
)
from ._distributions import (
    DEFAULT_LIMITS,
    SELECTION_FAMILIES,
    DistributionSpec,
    Family,
    ParamDraw,
    PriorLimits,
    draw_params,
    moments_of,
    sample_pseudo,
    summary_of,
)
from ._engine import (
    AbcConfig,
    AbcResult,
    Candidate,
    Progress,
    distance,
    run_abc,
    run_abc_async,
    run_selection,
    run_selection_async,
    top_k,
)
from ._errors import (
    AbcMetaError,
    BadSampleSize,
    BatchFormatError,
    EmptySample,
    InsufficientCandidates,
    InvalidConfig,
    InvalidParam,
    InvalidPrior,
    NonFiniteValue,
    NonPositiveSupport,
    OrderingViolation,
    OutOfBounds,
    ShiftInsufficient,
    TooFewPoints,
    UnsupportedPattern,
    ValidationError,
)
from ._progress import progress_display, render_progress
from ._rescale import (
    BoundsTransform,
    apply_shift,
    auto_shift,
    from_unit_moments,
    to_unit,
    unshift_result,
)
from ._rng import study_seed, substream
from ._summary import (
    SELECT,
    Scenario,
    StudyRecord,
    SummaryStats,
    parse_summary,
    required_positive,
)

__all__ = [
    "AbcConfig",
    "AbcMetaError",
    "AbcResult",
    "BadSampleSize",
    "BatchFormatError",
    "BatchOptions",
    "BoundsTransform",
    "Candidate",
    "DEFAULT_LIMITS",
    "DistributionSpec",
    "EmptySample",
    "Family",
    "InsufficientCandidates",
    "InvalidConfig",
    "InvalidParam",
    "InvalidPrior",
    "NonFiniteValue",
    "NonPositiveSupport",
    "OrderingViolation",
    "OutOfBounds",
    "ParamDraw",
    "PriorLimits",
    "Progress",
    "ReportRow",
    "SELECT",
    "SELECTION_FAMILIES",
    "Scenario",
    "ShiftInsufficient",
    "StudyRecord",
    "StudyRow",
    "SummaryStats",
    "TooFewPoints",
    "UnsupportedPattern",
    "ValidationError",
    "apply_shift",
    "auto_shift",
    "distance",
    "draw_params",
    "from_unit_moments",
    "make_record",
    "moments_of",
    "parse_summary",
    "progress_display",
    "read_batch",
    "render_progress",
    "required_positive",
    "run_abc",
    "run_abc_async",
    "run_batch",
    "run_selection",
    "run_selection_async",
    "run_study",
    "sample_pseudo",
    "study_seed",
    "substream",
    "summary_of",
    "to_unit",
    "top_k",
    "unshift_result",
    "write_report",
]
