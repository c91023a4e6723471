"""Dense linear-algebra primitives.

Matrices are plain float64 numpy arrays stored row-major (C order); every
function here assumes that layout. Index sets are sorted int64 arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

RANK_RTOL = _kernels.RANK_RTOL
ORTHONORMAL_ATOL = 1e-8


def index_set(indices, n: int) -> np.ndarray:
    """Validate and return a strictly increasing int64 index array in [0, n)."""
    idx = np.ascontiguousarray(indices, dtype=np.int64).reshape(-1)
    if idx.size:
        if idx[0] < 0 or idx[-1] >= n:
            raise ValueError(f"indices must lie in [0, {n})")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
    return idx


@dataclass(frozen=True)
class MaskedVector:
    """A vector of ambient dimension ``ambient_dim`` observed on ``support``."""

    ambient_dim: int
    support: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        support = index_set(self.support, self.ambient_dim)
        values = np.ascontiguousarray(self.values, dtype=np.float64).reshape(-1)
        if values.shape[0] != support.shape[0]:
            raise ValueError(
                f"values has length {values.shape[0]}, support has {support.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("observed values must be finite")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_full(cls, v, support=None) -> "MaskedVector":
        v = np.asarray(v, dtype=np.float64)
        if support is None:
            support = np.arange(v.shape[0])
        support = np.asarray(support, dtype=np.int64)
        return cls(v.shape[0], support, v[support])

    def dense(self, fill: float = 0.0) -> np.ndarray:
        out = np.full(self.ambient_dim, fill)
        out[self.support] = self.values
        return out

    def __len__(self) -> int:
        return self.support.shape[0]


def _as_matrix(A) -> np.ndarray:
    A = np.ascontiguousarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    return A


def masked_least_squares(U, obs: MaskedVector) -> tuple[np.ndarray, bool]:
    """Solve ``min_a ||U[obs.support] a - obs.values||`` with an orthogonal factorization.

    Returns ``(w, rank_ok)``. ``rank_ok`` is False when the smallest singular
    value of the row-restricted basis is at most ``RANK_RTOL`` times the
    largest; ``w`` is then the minimum-norm minimizer.
    """
    U = _as_matrix(U)
    if obs.ambient_dim != U.shape[0]:
        raise ValueError(
            f"observation has ambient dimension {obs.ambient_dim}, basis has {U.shape[0]} rows"
        )
    UO = _kernels.gather_rows(U, obs.support)
    return _kernels.masked_lsq(UO, obs.values)


def orthonormalize(A) -> np.ndarray:
    """Orthonormal basis for the column span of a full-column-rank matrix.

    Uses Householder QR; column signs are fixed so that R has a non-negative
    diagonal, which makes the output a deterministic function of ``A``.
    """
    A = _as_matrix(A)
    n, d = A.shape
    if d > n:
        raise ValueError(f"cannot orthonormalize {d} columns in dimension {n}")
    Q, R = np.linalg.qr(A)
    sv = np.linalg.svd(R, compute_uv=False)
    if d and not sv[-1] > RANK_RTOL * sv[0]:
        raise np.linalg.LinAlgError("matrix does not have full column rank")
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    return np.ascontiguousarray(Q * signs)


def _is_skew(B) -> bool:
    scale = np.linalg.norm(B)
    return np.linalg.norm(B + B.T) <= 1e-12 * scale


def expm_skew(B, s: float) -> np.ndarray:
    """``exp(s B)`` for skew-symmetric ``B`` by scaling and squaring.

    The scaled argument has 1-norm at most 1/2, where a 20-term Taylor
    series is accurate to double precision.
    """
    B = _as_matrix(B)
    n = B.shape[0]
    if B.shape != (n, n):
        raise ValueError("B must be square")
    if not _is_skew(B):
        raise ValueError("B must be skew-symmetric")
    A = s * B
    norm1 = np.abs(A).sum(axis=0).max() if n else 0.0
    squarings = max(0, int(np.ceil(np.log2(norm1 / 0.5)))) if norm1 > 0.5 else 0
    A = A / 2.0**squarings
    E = np.eye(n)
    term = np.eye(n)
    for k in range(1, 21):
        term = term @ A / k
        E += term
        if np.abs(term).max() < 1e-18:
            break
    for _ in range(squarings):
        E = E @ E
    return E


def check_orthonormal(U, atol: float = ORTHONORMAL_ATOL) -> None:
    d = U.shape[1]
    err = np.linalg.norm(U.T @ U - np.eye(d))
    if err > atol:
        raise ValueError(f"basis is not orthonormal (||U^T U - I||_F = {err:.3e})")


def subspace_error(U, W) -> float:
    """Normalized projection residual ``||(I - U U^T) W||_F / sqrt(d)``.

    Zero when the spans coincide and one when they are orthogonal. The
    residual is formed explicitly (not via ``d - ||U^T W||^2``) so that
    errors near machine precision stay resolvable.
    """
    U = _as_matrix(U)
    W = _as_matrix(W)
    if U.shape != W.shape:
        raise ValueError(f"shape mismatch: {U.shape} vs {W.shape}")
    check_orthonormal(U)
    check_orthonormal(W)
    d = U.shape[1]
    resid = W - U @ (U.T @ W)
    return float(np.linalg.norm(resid) / np.sqrt(d))
