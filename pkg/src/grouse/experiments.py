"""End-to-end experiment protocols driven by an ``ExperimentSpec``."""
from __future__ import annotations

import logging
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import csvio
from .bench import bench_linear_scaling, growth_ratios
from .completion import (
    fit_coefficients,
    low_rank_problem,
    relative_error,
    solve_completion,
    svd_baseline_error,
)
from .config import ExperimentSpec, dump_spec
from .engine import grouse_step, new_tracker, residual_signal
from .linalg import subspace_error
from .streamgen import SyntheticStream, observe

log = logging.getLogger(__name__)

OUTPUT_ENV = "GROUSE_OUTPUT_DIR"


@dataclass
class RunSummary:
    experiment: str
    steps: int
    final_error: float
    mean_ns_per_step: float
    outputs: dict[str, Path] = field(default_factory=dict)
    extra: dict[str, float] = field(default_factory=dict)

    def line(self) -> str:
        parts = [
            f"{self.experiment}:",
            f"steps={self.steps}",
            f"final_error={self.final_error:.4e}",
            f"mean_ns_per_step={self.mean_ns_per_step:.0f}",
        ]
        parts += [f"{k}={v:.4g}" for k, v in self.extra.items()]
        return " ".join(parts)


def resolve_output_dir(spec: ExperimentSpec, out=None) -> Path:
    """``out`` argument, else ``$GROUSE_OUTPUT_DIR``, else ``spec.output_path``."""
    return Path(out or os.environ.get(OUTPUT_ENV) or spec.output_path)


def _run_synthetic(spec: ExperimentSpec, out: Path) -> RunSummary:
    stream = SyntheticStream(spec.generative_model())
    sampling = spec.sampling_model()
    config = spec.tracker_config()
    state = new_tracker(spec.n, spec.d, spec.sub_seeds()["tracker"])
    dumps = set(spec.dump_bases_at)
    rows = []
    total_ns = 0
    clock = time.perf_counter_ns
    for t in range(1, spec.horizon + 1):
        obs = observe(stream, sampling, t)
        t0 = clock()
        _, report = grouse_step(state, obs, config)
        ns = clock() - t0
        total_ns += ns
        if t % spec.report_every == 0 or t == spec.horizon:
            truth = stream.basis(t)
            rows.append(
                csvio.TelemetryRow(
                    t, report.eta, residual_signal(report), report.residual_norm**2,
                    subspace_error(state.basis, truth), report.skipped, ns,
                )
            )
        if t in dumps:
            csvio.write_matrix(out / f"basis_{t}.csv", state.basis)
            csvio.write_matrix(out / f"truth_{t}.csv", stream.basis(t))
    path = out / "telemetry.csv"
    csvio.write_telemetry(path, rows)
    return RunSummary(
        spec.experiment, spec.horizon, rows[-1].subspace_error,
        total_ns / spec.horizon, {"telemetry": path},
    )


def _run_stream_csv(spec: ExperimentSpec, out: Path) -> RunSummary:
    """One pass over a recorded stream; scores the per-step predictions U_t w_t."""
    data = csvio.read_stream_matrix(spec.input_path)
    T, n = data.shape
    if not 1 <= spec.d < n:
        raise ValueError(f"d={spec.d} must be below the stream dimension n={n}")
    sampling = spec.sampling_model() if spec.density < 1 else None
    config = spec.tracker_config()
    state = new_tracker(n, spec.d, spec.sub_seeds()["tracker"])
    horizon = min(T, spec.horizon)
    predictions = np.empty((horizon, n))
    rows = []
    total_ns = 0
    clock = time.perf_counter_ns
    for t, obs in enumerate(csvio.ingest_stream_csv(spec.input_path, sampling), 1):
        if t > horizon:
            break
        before = state.basis.copy()
        t0 = clock()
        _, report = grouse_step(state, obs, config)
        ns = clock() - t0
        total_ns += ns
        predictions[t - 1] = before @ report.weights
        if t % spec.report_every == 0 or t == horizon:
            rows.append(
                csvio.TelemetryRow(
                    t, report.eta, residual_signal(report), report.residual_norm**2,
                    math.nan, report.skipped, ns,
                )
            )
    window = slice(spec.eval_start - 1, horizon)
    truth = data[window]
    known = ~np.isnan(truth)
    err = relative_error(predictions[window][known], truth[known])
    extra = {"reconstruction_error": err}
    if known.all():
        extra["svd_baseline_error"] = svd_baseline_error(truth, spec.d)
    path = out / "telemetry.csv"
    csvio.write_telemetry(path, rows)
    pred_path = out / "predictions.csv"
    csvio.write_stream_csv(pred_path, predictions)
    return RunSummary(
        spec.experiment, horizon, err, total_ns / horizon,
        {"telemetry": path, "predictions": pred_path}, extra,
    )


def _run_completion(spec: ExperimentSpec, out: Path) -> RunSummary:
    seeds = spec.sub_seeds()
    problem, truth = low_rank_problem(
        spec.n, spec.n_cols, spec.d, spec.density, spec.noise_std,
        seed=seeds["model"], passes=spec.passes,
    )
    columns = problem.columns()
    history = []

    def on_pass(k, U):
        A, rms = fit_coefficients(U, columns)
        err = relative_error(U @ A, truth)
        history.append((k, k * len(columns), rms, err))
        log.info("pass %d: observed rms %.3e, relative error %.3e", k, rms, err)

    t0 = time.perf_counter_ns()
    result = solve_completion(problem, spec.tracker_config(), on_pass=on_pass)
    elapsed = time.perf_counter_ns() - t0
    path = out / "completion_passes.csv"
    csvio.write_table(path, ["pass", "presentations", "observed_rms", "relative_error"], history)
    outputs = {"passes": path}
    if spec.save_matrices:
        outputs["reconstruction"] = out / "reconstruction.csv"
        csvio.write_matrix(outputs["reconstruction"], result.reconstruction)
        csvio.write_matrix(out / "basis.csv", result.basis.basis)
    err = relative_error(result.reconstruction, truth)
    steps = spec.passes * len(columns)
    return RunSummary(spec.experiment, steps, err, elapsed / steps, outputs)


def _run_bench(spec: ExperimentSpec, out: Path) -> RunSummary:
    points = bench_linear_scaling(
        spec.d, spec.bench_n, spec.density, spec.bench_steps, spec.bench_warmup, spec.seed
    )
    path = out / "bench.csv"
    csvio.write_table(
        path, ["n", "d", "n_observed", "median_ns", "steps"],
        [(p.n, p.d, p.n_observed, p.median_ns, p.steps) for p in points],
    )
    ratios = growth_ratios(points)
    extra = {f"ratio_{a.n}_{b.n}": r for a, b, r in zip(points, points[1:], ratios)}
    return RunSummary(
        spec.experiment, sum(p.steps for p in points), math.nan,
        float(np.mean([p.median_ns for p in points])), {"bench": path}, extra,
    )


_RUNNERS = {
    "static": _run_synthetic,
    "switching": _run_synthetic,
    "rotating": _run_synthetic,
    "stream_csv": _run_stream_csv,
    "completion": _run_completion,
    "bench": _run_bench,
}


def run_experiment(spec: ExperimentSpec, out=None) -> RunSummary:
    """Run the protocol named by ``spec.experiment`` and write its CSV outputs."""
    out_dir = resolve_output_dir(spec, out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.cfg").write_text(dump_spec(spec), encoding="utf-8")
    return _RUNNERS[spec.experiment](spec, out_dir)
