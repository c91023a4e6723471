"""GROUSE: subspace tracking from incomplete observations by rank-one geodesic updates."""
from .completion import (
    CompletionProblem,
    CompletionResult,
    low_rank_problem,
    relative_error,
    solve_completion,
    svd_baseline_error,
)
from .engine import (
    RankPolicy,
    ScheduleKind,
    SkipReason,
    StepSchedule,
    SubspaceEstimate,
    TrackerConfig,
    UpdateReport,
    eta_for_step,
    euclidean_gradient,
    evaluate_cost,
    grouse_step,
    new_tracker,
    residual_signal,
    rotation_form_step,
    track,
)
from .linalg import (
    MaskedVector,
    expm_skew,
    index_set,
    masked_least_squares,
    orthonormalize,
    subspace_error,
)
from .streamgen import (
    GenerativeModel,
    SamplingModel,
    SyntheticStream,
    draw_mask,
    next_vector,
    planted_subspace,
    sensor_like_stream,
)

__version__ = "0.1.0"
