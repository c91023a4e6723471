"""The GROUSE tracker: incremental gradient descent along Grassmannian geodesics.

Each observed vector triggers one rank-one update of an orthonormal n x d
basis. Degenerate observations are skipped and the reason recorded instead
of raising, so a stream never stalls on a bad sample.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .linalg import MaskedVector, check_orthonormal, masked_least_squares, orthonormalize


class ScheduleKind(str, enum.Enum):
    DIMINISHING = "diminishing"
    CONSTANT = "constant"


class RankPolicy(str, enum.Enum):
    SKIP = "skip"
    MIN_NORM = "min_norm"


class SkipReason(str, enum.Enum):
    NONE = "none"
    TOO_FEW_SAMPLES = "too_few_samples"
    RANK_DEFICIENT = "rank_deficient"
    NEGLIGIBLE_RESIDUAL = "negligible_residual"


_SKIP_BY_STATUS = {
    _kernels.UPDATED: SkipReason.NONE,
    _kernels.TOO_FEW_SAMPLES: SkipReason.TOO_FEW_SAMPLES,
    _kernels.RANK_DEFICIENT: SkipReason.RANK_DEFICIENT,
    _kernels.NEGLIGIBLE_RESIDUAL: SkipReason.NEGLIGIBLE_RESIDUAL,
}


@dataclass(frozen=True)
class StepSchedule:
    """Step size ``c / t`` (diminishing) or ``c`` (constant)."""

    kind: ScheduleKind = ScheduleKind.DIMINISHING
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if not self.c > 0:
            raise ValueError(f"step constant must be positive, got {self.c}")


@dataclass(frozen=True)
class TrackerConfig:
    schedule: StepSchedule = field(default_factory=StepSchedule)
    # an update needs |omega| > min_samples_factor * d
    min_samples_factor: float = 1.0
    # skip when ||r|| ||p|| <= residual_tol * ||v_omega||^2
    residual_tol: float = 1e-14
    rank_policy: RankPolicy = RankPolicy.SKIP

    def __post_init__(self):
        object.__setattr__(self, "rank_policy", RankPolicy(self.rank_policy))
        if self.min_samples_factor < 1:
            raise ValueError("min_samples_factor must be >= 1")
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")


@dataclass
class SubspaceEstimate:
    """Tracker state: an orthonormal ``n x d`` basis and the number of vectors seen."""

    basis: np.ndarray
    step_count: int = 0

    def __post_init__(self):
        self.basis = np.ascontiguousarray(self.basis, dtype=np.float64)
        n, d = self.basis.shape
        if not 1 <= d < n:
            raise ValueError(f"need 1 <= d < n, got n={n}, d={d}")

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def copy(self) -> "SubspaceEstimate":
        return SubspaceEstimate(self.basis.copy(), self.step_count)

    def check(self, atol: float = 1e-8) -> None:
        check_orthonormal(self.basis, atol)


@dataclass(frozen=True, slots=True)
class UpdateReport:
    weights: np.ndarray
    predicted_norm: float
    residual_norm: float
    observed_norm: float
    sigma: float
    # the scheduled step size for this t; nothing is applied when skipped
    eta: float
    skipped: bool
    skip_reason: SkipReason


def new_tracker(n: int, d: int, seed=None, config: TrackerConfig | None = None) -> SubspaceEstimate:
    """Random starting basis: orthonormalized i.i.d. standard normal ``n x d`` matrix."""
    if not 1 <= d < n:
        raise ValueError(f"need 1 <= d < n, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    return SubspaceEstimate(orthonormalize(rng.standard_normal((n, d))))


def eta_for_step(schedule: StepSchedule, t: int) -> float:
    if t < 1:
        raise ValueError("steps are counted from 1")
    if schedule.kind is ScheduleKind.DIMINISHING:
        return schedule.c / t
    return schedule.c


DEFAULT_CONFIG = TrackerConfig()


def grouse_step(
    state: SubspaceEstimate, obs: MaskedVector, config: TrackerConfig = DEFAULT_CONFIG
) -> tuple[SubspaceEstimate, UpdateReport]:
    """Present one observation to the tracker; ``state`` is updated in place.

    ``step_count`` advances on every call, including skipped ones.
    """
    if obs.ambient_dim != state.basis.shape[0]:
        raise ValueError(
            f"observation has ambient dimension {obs.ambient_dim}, tracker has {state.basis.shape[0]}"
        )
    t = state.step_count + 1
    eta = eta_for_step(config.schedule, t)
    status, w, p_norm, r_norm, v_norm, sigma = _kernels.grouse_update(
        state.basis,
        obs.support,
        obs.values,
        eta,
        config.min_samples_factor * state.basis.shape[1],
        config.residual_tol,
        config.rank_policy is RankPolicy.SKIP,
    )
    if status == _kernels.NON_FINITE:
        raise ValueError("observation contains non-finite values")
    if status == _kernels.NORM_DRIFT:
        raise FloatingPointError(
            f"basis drifted from orthonormality: ||p||={p_norm!r}, ||w||={np.linalg.norm(w)!r}"
        )
    state.step_count = t
    reason = _SKIP_BY_STATUS[status]
    return state, UpdateReport(
        w, p_norm, r_norm, v_norm, sigma, eta, reason is not SkipReason.NONE, reason
    )


def _residual(U: np.ndarray, obs: MaskedVector, w: np.ndarray) -> np.ndarray:
    return obs.values - U[obs.support] @ w


def evaluate_cost(state: SubspaceEstimate, obs: MaskedVector) -> float:
    """Squared distance from the observed entries to the subspace restricted to them."""
    w, _ = masked_least_squares(state.basis, obs)
    r = _residual(state.basis, obs, w)
    return float(r @ r)


def euclidean_gradient(
    state: SubspaceEstimate, obs: MaskedVector, config: TrackerConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """Derivative of the cost with respect to the basis entries: ``-2 r w^T``."""
    w, rank_ok = masked_least_squares(state.basis, obs)
    if not rank_ok and config.rank_policy is RankPolicy.SKIP:
        raise np.linalg.LinAlgError("restricted basis is rank deficient")
    grad = np.zeros_like(state.basis)
    grad[obs.support] = -2.0 * np.outer(_residual(state.basis, obs, w), w)
    return grad


def rotation_form_step(state: SubspaceEstimate, obs: MaskedVector, eta: float) -> np.ndarray:
    """Same update written as ``[U, r/||r||] R`` with the last column dropped.

    Dense and slow; exists to cross-check ``grouse_step``. Does not modify ``state``.
    """
    U = state.basis
    n, d = U.shape
    w, _ = masked_least_squares(U, obs)
    r = np.zeros(n)
    r[obs.support] = _residual(U, obs, w)
    r_norm = np.linalg.norm(r)
    p_norm = np.linalg.norm(U @ w)
    w_norm = np.linalg.norm(w)
    if r_norm == 0 or w_norm == 0:
        raise ValueError("degenerate observation: zero residual or zero weights")
    theta = r_norm * p_norm * eta
    wh = w / w_norm
    R = np.empty((d + 1, d + 1))
    R[:d, :d] = np.eye(d) - np.outer(wh, wh) * (1 - np.cos(theta))
    R[:d, d] = -wh * np.sin(theta)
    R[d, :d] = wh * np.sin(theta)
    R[d, d] = np.cos(theta)
    return (np.column_stack([U, r / r_norm]) @ R)[:, :d]


def residual_signal(report: UpdateReport) -> float:
    """``||r|| / ||v_omega||``, a proxy for distance to the true subspace."""
    if report.observed_norm == 0:
        return 0.0
    return report.residual_norm / report.observed_norm


def track(state: SubspaceEstimate, observations, config: TrackerConfig = DEFAULT_CONFIG):
    """Run ``grouse_step`` over an iterable, yielding each report."""
    for obs in observations:
        yield grouse_step(state, obs, config)[1]
