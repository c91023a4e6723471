"""Synthetic vector streams with a planted subspace, and observation masks.

Randomness comes from numpy's PCG64 ``Generator``. Every draw is keyed on
``(seed, t)`` through ``SeedSequence`` so that any time step can be
regenerated on its own, in any order, with identical results.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import MaskedVector, orthonormalize

# stream keys, so basis, coefficient, noise and mask draws never share a stream
_BASIS, _ALPHA, _NOISE, _MASK, _SKEW = range(5)


def _rng(seed, *key) -> np.random.Generator:
    return np.random.default_rng([int(seed), *key])


class ModelKind(str, enum.Enum):
    STATIC = "static"
    SWITCHING = "switching"
    ROTATING = "rotating"


class SamplingKind(str, enum.Enum):
    FIXED_SIZE = "fixed_size"
    BERNOULLI = "bernoulli"


@dataclass(frozen=True)
class GenerativeModel:
    kind: ModelKind = ModelKind.STATIC
    n: int = 700
    d: int = 10
    noise_std: float = 0.0
    switch_times: tuple[int, ...] = ()
    delta: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        object.__setattr__(self, "switch_times", tuple(int(s) for s in self.switch_times))
        if not 1 <= self.d < self.n:
            raise ValueError(f"need 1 <= d < n, got n={self.n}, d={self.d}")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        if any(b <= a for a, b in zip(self.switch_times, self.switch_times[1:])):
            raise ValueError("switch_times must be strictly increasing")
        if self.kind is ModelKind.ROTATING and not self.delta > 0:
            raise ValueError("delta must be positive for a rotating model")


@dataclass(frozen=True)
class SamplingModel:
    kind: SamplingKind = SamplingKind.FIXED_SIZE
    density: float = 0.17
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", SamplingKind(self.kind))
        if not 0 < self.density <= 1:
            raise ValueError(f"density must be in (0, 1], got {self.density}")


def planted_subspace(n: int, d: int, seed) -> np.ndarray:
    """Uniformly distributed d-dimensional subspace of R^n, as an orthonormal basis."""
    if not 1 <= d < n:
        raise ValueError(f"need 1 <= d < n, got n={n}, d={d}")
    return orthonormalize(np.random.default_rng(seed).standard_normal((n, d)))


def random_skew(n: int, seed) -> np.ndarray:
    """Gaussian skew-symmetric matrix scaled to unit spectral norm."""
    T = np.triu(np.random.default_rng(seed).standard_normal((n, n)), k=1)
    B = T - T.T
    return B / np.linalg.norm(B, 2)


class SyntheticStream:
    """Vectors ``v_t = U[t] alpha_t + beta_t`` for t = 1, 2, ...

    ``U[t]`` is fixed (static), redrawn at each switch time (switching), or
    ``exp(delta t B) U_0`` (rotating). For the rotating model the propagator
    is applied through an eigendecomposition of the Hermitian matrix ``iB``,
    so a single vector costs O(n^2) instead of a full matrix exponential.
    """

    def __init__(self, model: GenerativeModel):
        self.model = model
        self._segment_bases: dict[int, np.ndarray] = {}

    def _segment(self, t: int) -> int:
        return int(np.searchsorted(self.model.switch_times, t, side="right"))

    def _segment_basis(self, k: int) -> np.ndarray:
        if k not in self._segment_bases:
            m = self.model
            self._segment_bases[k] = planted_subspace(m.n, m.d, [m.seed, _BASIS, k])
        return self._segment_bases[k]

    @cached_property
    def skew_generator(self) -> np.ndarray:
        m = self.model
        return random_skew(m.n, [m.seed, _SKEW])

    @cached_property
    def _spectral(self):
        lam, Q = np.linalg.eigh(1j * self.skew_generator)
        # exp(sB) = Q diag(exp(-i s lam)) Q^H
        return lam, Q, Q.conj().T @ self._segment_basis(0)

    def basis(self, t: int) -> np.ndarray:
        """Orthonormal basis of the true subspace at time ``t``."""
        m = self.model
        if m.kind is ModelKind.ROTATING:
            lam, Q, C = self._spectral
            phase = np.exp(-1j * m.delta * t * lam)
            return np.ascontiguousarray((Q @ (phase[:, None] * C)).real)
        if m.kind is ModelKind.SWITCHING:
            return self._segment_basis(self._segment(t))
        return self._segment_basis(0)

    def vector(self, t: int) -> np.ndarray:
        """The full (unmasked) vector at time ``t``."""
        if t < 0:
            raise ValueError("t must be non-negative")
        m = self.model
        alpha = _rng(m.seed, _ALPHA, t).standard_normal(m.d)
        if m.kind is ModelKind.ROTATING:
            lam, Q, C = self._spectral
            phase = np.exp(-1j * m.delta * t * lam)
            v = (Q @ (phase * (C @ alpha))).real
        else:
            v = self.basis(t) @ alpha
        if m.noise_std > 0:
            v = v + m.noise_std * _rng(m.seed, _NOISE, t).standard_normal(m.n)
        return v

    def __iter__(self):
        t = 1
        while True:
            yield self.vector(t)
            t += 1


def next_vector(stream: SyntheticStream, t: int) -> np.ndarray:
    return stream.vector(t)


def draw_mask(sampling: SamplingModel, n: int, t: int) -> np.ndarray:
    """Observed index set at time ``t``, sorted."""
    if sampling.density == 1:
        return np.arange(n, dtype=np.int64)
    rng = _rng(sampling.seed, _MASK, t)
    if sampling.kind is SamplingKind.FIXED_SIZE:
        k = round(sampling.density * n)
        if k == 0:
            raise ValueError(f"density {sampling.density} gives an empty mask for n={n}")
        return np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)
    return np.flatnonzero(rng.random(n) < sampling.density).astype(np.int64)


def observe(stream: SyntheticStream, sampling: SamplingModel, t: int) -> MaskedVector:
    v = stream.vector(t)
    return MaskedVector.from_full(v, draw_mask(sampling, v.shape[0], t))


def observations(stream: SyntheticStream, sampling: SamplingModel, horizon: int, start: int = 1):
    for t in range(start, start + horizon):
        yield observe(stream, sampling, t)


def sensor_like_stream(
    T: int = 4310,
    n: int = 166,
    d: int = 6,
    noise_std: float = 0.05,
    missing: float = 0.0,
    scale: float = 0.3,
    seed: int = 0,
) -> np.ndarray:
    """Stand-in for a recorded sensor stream, shape ``(T, n)``, NaN where missing.

    Each row mixes ``d`` slow periodic profiles through fixed nonnegative
    loadings, so the data are close to rank ``d`` with a nonzero mean, the way
    daily-cycle sensor readings tend to be. ``scale`` is the mean absolute
    reading; it matters because the step angle grows with ``||v||^2``.
    """
    if not 1 <= d < n:
        raise ValueError(f"need 1 <= d < n, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    t = np.arange(T)[:, None]
    periods = rng.uniform(150.0, 600.0, d)
    phases = rng.uniform(0.0, 2 * np.pi, d)
    profiles = 1.0 + 0.8 * np.sin(2 * np.pi * t / periods + phases)
    loadings = rng.gamma(2.0, 0.5, (d, n))
    data = profiles @ loadings
    data *= scale / np.abs(data).mean()
    data += noise_std * scale * rng.standard_normal(data.shape)
    if missing > 0:
        data[rng.random(data.shape) < missing] = np.nan
    return data
