"""Online matrix completion by streaming the columns through the tracker.

Each pass presents every column once, in a fresh random order. After the
last pass the coefficients are re-fit column by column against the frozen
basis, so the completed matrix ``U @ A`` belongs to one subspace.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import (
    StepSchedule,
    SubspaceEstimate,
    TrackerConfig,
    grouse_step,
    new_tracker,
)
from .linalg import MaskedVector, masked_least_squares

DEFAULT_COMPLETION_CONFIG = TrackerConfig(schedule=StepSchedule("diminishing", 0.3))


@dataclass
class CompletionProblem:
    n_rows: int
    n_cols: int
    rank: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    passes: int = 10
    shuffle_seed: int = 0
    init_seed: int | None = None

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.int64).reshape(-1)
        self.cols = np.asarray(self.cols, dtype=np.int64).reshape(-1)
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if not (self.rows.shape == self.cols.shape == self.values.shape):
            raise ValueError("rows, cols and values must have equal length")
        if self.passes < 1:
            raise ValueError("passes must be >= 1")
        if not 1 <= self.rank < min(self.n_rows, self.n_cols):
            raise ValueError(
                f"rank {self.rank} must be in [1, min(n_rows, n_cols)) = [1, {min(self.n_rows, self.n_cols)})"
            )
        if self.rows.size:
            if self.rows.min() < 0 or self.rows.max() >= self.n_rows:
                raise ValueError("row index out of range")
            if self.cols.min() < 0 or self.cols.max() >= self.n_cols:
                raise ValueError("column index out of range")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("observed values must be finite")
        key = self.cols * self.n_rows + self.rows
        if np.unique(key).size != key.size:
            raise ValueError("duplicate (row, col) entries")

    @property
    def n_observed(self) -> int:
        return self.values.size

    def columns(self) -> list[MaskedVector]:
        """Observations grouped into one masked vector per column."""
        order = np.lexsort((self.rows, self.cols))
        rows, cols, vals = self.rows[order], self.cols[order], self.values[order]
        bounds = np.searchsorted(cols, np.arange(self.n_cols + 1))
        return [
            MaskedVector(self.n_rows, rows[a:b], vals[a:b])
            for a, b in zip(bounds[:-1], bounds[1:])
        ]

    @property
    def empty_columns(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.n_cols), self.cols)


@dataclass
class CompletionResult:
    basis: SubspaceEstimate
    coefficients: np.ndarray
    reconstruction: np.ndarray
    fit_history: list[float] = field(default_factory=list)
    empty_columns: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


def fit_coefficients(U: np.ndarray, columns: list[MaskedVector]) -> tuple[np.ndarray, float]:
    """Per-column least-squares coefficients against ``U`` and the observed-entry RMS."""
    A = np.zeros((U.shape[1], len(columns)))
    sq = 0.0
    count = 0
    for j, col in enumerate(columns):
        if len(col) == 0:
            continue
        w, _ = masked_least_squares(U, col)
        A[:, j] = w
        r = col.values - U[col.support] @ w
        sq += float(r @ r)
        count += len(col)
    return A, (float(np.sqrt(sq / count)) if count else 0.0)


def solve_completion(
    problem: CompletionProblem,
    config: TrackerConfig = DEFAULT_COMPLETION_CONFIG,
    on_pass=None,
) -> CompletionResult:
    """Complete ``problem`` with ``problem.passes`` shuffled passes of GROUSE.

    ``on_pass(k, basis)`` is called after each pass with a copy-free view of
    the current basis; it must not modify it. ``fit_history`` records the
    observed-entry RMS after each pass.
    """
    columns = problem.columns()
    state = new_tracker(problem.n_rows, problem.rank, problem.init_seed)
    rng = np.random.default_rng(problem.shuffle_seed)
    history = []
    nonempty = np.array([j for j, c in enumerate(columns) if len(c)], dtype=np.int64)
    for k in range(problem.passes):
        for j in rng.permutation(nonempty):
            grouse_step(state, columns[j], config)
        _, rms = fit_coefficients(state.basis, columns)
        history.append(rms)
        if on_pass is not None:
            on_pass(k + 1, state.basis)
    A, _ = fit_coefficients(state.basis, columns)
    return CompletionResult(
        basis=state,
        coefficients=A,
        reconstruction=state.basis @ A,
        fit_history=history,
        empty_columns=problem.empty_columns,
    )


def relative_error(reconstruction, truth) -> float:
    """``||X - V||_F / ||V||_F``."""
    X = np.asarray(reconstruction, dtype=np.float64)
    V = np.asarray(truth, dtype=np.float64)
    if X.shape != V.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {V.shape}")
    ref = np.linalg.norm(V)
    if ref == 0:
        raise ValueError("reference matrix is zero")
    return float(np.linalg.norm(X - V) / ref)


def svd_baseline_error(data, rank: int) -> float:
    """Relative error of the best rank-``rank`` approximation of ``data``."""
    V = np.asarray(data, dtype=np.float64)
    if not 0 <= rank <= min(V.shape):
        raise ValueError(f"rank must be in [0, {min(V.shape)}]")
    s = np.linalg.svd(V, compute_uv=False)
    total = np.sqrt(np.sum(s**2))
    if total == 0:
        raise ValueError("reference matrix is zero")
    # tail energy directly; avoids forming the truncated product
    return float(np.sqrt(np.sum(s[rank:] ** 2)) / total)


def low_rank_problem(
    n_rows: int,
    n_cols: int,
    rank: int,
    density: float,
    noise_std: float = 0.0,
    seed: int = 0,
    passes: int = 10,
) -> tuple[CompletionProblem, np.ndarray]:
    """Random test problem: ``Y_L @ Y_R`` with Gaussian factors, entries kept i.i.d. with ``density``.

    Noise is added to the observed entries only; the returned truth is noiseless.
    """
    rng = np.random.default_rng(seed)
    truth = rng.standard_normal((n_rows, rank)) @ rng.standard_normal((rank, n_cols))
    mask = rng.random((n_rows, n_cols)) < density
    rows, cols = np.nonzero(mask)
    vals = truth[rows, cols]
    if noise_std > 0:
        vals = vals + noise_std * rng.standard_normal(vals.shape)
    problem = CompletionProblem(
        n_rows, n_cols, rank, rows, cols, vals, passes=passes,
        shuffle_seed=int(rng.integers(2**31)), init_seed=int(rng.integers(2**31)),
    )
    return problem, truth
