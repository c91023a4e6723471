"""Steady-state timing of ``grouse_step`` across ambient dimensions."""
from __future__ import annotations

import gc
import time
from dataclasses import dataclass

import numpy as np

from .engine import StepSchedule, TrackerConfig, grouse_step, new_tracker
from .linalg import MaskedVector
from .streamgen import planted_subspace


@dataclass(frozen=True)
class BenchPoint:
    n: int
    d: int
    n_observed: int
    median_ns: float
    steps: int


class _StepRig:
    """Pre-generated observations and a tracker for one problem size."""

    def __init__(self, n, d, n_observed, count, seed, noise_std=1e-3, step_size=0.05):
        if not 1 <= d < n:
            raise ValueError(f"need 1 <= d < n, got n={n}, d={d}")
        if not d < n_observed <= n:
            raise ValueError(f"need d < n_observed <= n, got {n_observed}")
        rng = np.random.default_rng(seed)
        truth = planted_subspace(n, d, rng)
        self.obs = []
        for _ in range(count):
            idx = np.sort(rng.choice(n, n_observed, replace=False))
            v = truth @ rng.standard_normal(d) + noise_std * rng.standard_normal(n)
            self.obs.append(MaskedVector(n, idx, v[idx]))
        # constant step plus noise keeps every step on the full update path
        self.config = TrackerConfig(schedule=StepSchedule("constant", step_size))
        self.state = new_tracker(n, d, rng)
        self.shape = (n, d, n_observed)
        self.pos = 0
        self.samples: list[int] = []

    def run(self, k: int, record: bool = True) -> None:
        clock = time.perf_counter_ns
        state, config, samples = self.state, self.config, self.samples
        for o in self.obs[self.pos : self.pos + k]:
            t0 = clock()
            grouse_step(state, o, config)
            dt = clock() - t0
            if record:
                samples.append(dt)
        self.pos += k

    def point(self) -> BenchPoint:
        n, d, m = self.shape
        return BenchPoint(n, d, m, float(np.median(self.samples)), len(self.samples))


def _measure(rigs: list[_StepRig], steps: int, warmup: int, block: int) -> list[BenchPoint]:
    # round-robin blocks so slow machine drift hits every size alike
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for rig in rigs:
            rig.run(warmup, record=False)
        done = 0
        while done < steps:
            k = min(block, steps - done)
            for rig in rigs:
                rig.run(k)
            done += k
    finally:
        if gc_was_enabled:
            gc.enable()
    return [rig.point() for rig in rigs]


def time_steps(
    n: int,
    d: int,
    n_observed: int,
    steps: int = 2000,
    warmup: int = 200,
    seed: int = 0,
) -> BenchPoint:
    """Median wall time of one ``grouse_step``; generation sits outside the timed region."""
    return _measure([_StepRig(n, d, n_observed, warmup + steps, seed)], steps, warmup, steps)[0]


def time_interleaved(
    shapes,
    steps: int = 2000,
    warmup: int = 200,
    seed: int = 0,
    block: int = 50,
) -> list[BenchPoint]:
    """Time several ``(n, d, n_observed)`` problems together, in round-robin blocks.

    Each entry gets its own tracker and data; entries may repeat.
    """
    rigs = [_StepRig(n, d, m, warmup + steps, seed) for n, d, m in shapes]
    if not rigs:
        raise ValueError("no shapes to time")
    return _measure(rigs, steps, warmup, block)


def bench_linear_scaling(
    d: int = 10,
    n_values=(500, 1000, 2000, 4000),
    density: float = 0.17,
    steps: int = 2000,
    warmup: int = 200,
    seed: int = 0,
    block: int = 50,
) -> list[BenchPoint]:
    """Per-step median time for each ``n`` at fixed ``d`` and sampling density."""
    n_values = [int(n) for n in n_values]
    if len(n_values) < 3:
        raise ValueError("need at least 3 values of n")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n values must be strictly increasing")
    if steps < 1000:
        raise ValueError("need at least 1000 timed steps per size")
    shapes = [(n, d, max(d + 1, round(density * n))) for n in n_values]
    return time_interleaved(shapes, steps, warmup, seed, block)


def growth_ratios(points: list[BenchPoint]) -> list[float]:
    return [b.median_ns / a.median_ns for a, b in zip(points, points[1:])]
