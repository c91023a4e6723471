"""Experiment configuration: a flat ``key = value`` text format.

Blank lines and ``#`` comments are ignored. List values are comma
separated. Every field has a default, so a config file only needs the keys
it changes; ``--set key=value`` on the command line is applied on top.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .engine import RankPolicy, ScheduleKind, StepSchedule, TrackerConfig
from .streamgen import GenerativeModel, ModelKind, SamplingKind, SamplingModel

EXPERIMENTS = ("static", "switching", "rotating", "stream_csv", "completion", "bench")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str = "static"
    # generative model
    n: int = 700
    d: int = 10
    noise_std: float = 0.0
    switch_times: tuple[int, ...] = ()
    delta: float = 1e-5
    # sampling
    sampling: str = "fixed_size"
    density: float = 0.17
    # tracker
    schedule: str = "diminishing"
    step_c: float = 100.0
    min_samples_factor: float = 1.0
    residual_tol: float = 1e-14
    rank_policy: str = "skip"
    # run
    seed: int = 0
    horizon: int = 14000
    report_every: int = 100
    dump_bases_at: tuple[int, ...] = ()
    output_path: str = "out"
    # stream_csv
    input_path: str = ""
    eval_start: int = 1
    # completion
    n_cols: int = 700
    passes: int = 10
    save_matrices: bool = False
    # bench
    bench_n: tuple[int, ...] = (500, 1000, 2000, 4000)
    bench_steps: int = 2000
    bench_warmup: int = 200

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment: must be one of {', '.join(EXPERIMENTS)}")
        if self.horizon < 1:
            raise ConfigError("horizon: must be >= 1")
        if self.report_every < 1:
            raise ConfigError("report_every: must be >= 1")
        if not 1 <= self.d < self.n:
            raise ConfigError("d: need 1 <= d < n")
        if not 0 < self.density <= 1:
            raise ConfigError("density: must be in (0, 1]")
        if not self.step_c > 0:
            raise ConfigError("step_c: must be positive")
        for name, enum_type in (
            ("sampling", SamplingKind),
            ("schedule", ScheduleKind),
            ("rank_policy", RankPolicy),
        ):
            try:
                enum_type(getattr(self, name))
            except ValueError:
                choices = ", ".join(e.value for e in enum_type)
                raise ConfigError(f"{name}: must be one of {choices}") from None
        if self.experiment == "stream_csv":
            if not self.input_path:
                raise ConfigError("input_path: required for stream_csv")
            if not Path(self.input_path).is_file():
                raise ConfigError(f"input_path: no such file {self.input_path!r}")

    # derived objects -----------------------------------------------------

    def sub_seeds(self) -> dict[str, int]:
        model, mask, tracker, shuffle = np.random.SeedSequence(self.seed).generate_state(4)
        return {"model": int(model), "mask": int(mask), "tracker": int(tracker), "shuffle": int(shuffle)}

    def tracker_config(self) -> TrackerConfig:
        return TrackerConfig(
            schedule=StepSchedule(self.schedule, self.step_c),
            min_samples_factor=self.min_samples_factor,
            residual_tol=self.residual_tol,
            rank_policy=self.rank_policy,
        )

    def generative_model(self) -> GenerativeModel:
        kind = {"static": ModelKind.STATIC, "switching": ModelKind.SWITCHING,
                "rotating": ModelKind.ROTATING}[self.experiment]
        return GenerativeModel(
            kind=kind, n=self.n, d=self.d, noise_std=self.noise_std,
            switch_times=self.switch_times, delta=self.delta, seed=self.sub_seeds()["model"],
        )

    def sampling_model(self) -> SamplingModel:
        return SamplingModel(self.sampling, self.density, self.sub_seeds()["mask"])


_FIELDS = {f.name: f for f in fields(ExperimentSpec)}


def _parse_value(name: str, raw: str):
    ftype = _FIELDS[name].type
    raw = raw.strip()
    try:
        if ftype == "int":
            return int(raw)
        if ftype == "float":
            return float(raw)
        if ftype == "bool":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if ftype == "tuple[int, ...]":
            return tuple(int(x) for x in raw.split(",") if x.strip())
        return raw
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {ftype}") from None


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def parse_assignments(lines, source: str = "<config>") -> dict:
    values = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"{key}: unknown field ({source}:{lineno})")
        values[key] = _parse_value(key, raw)
    return values


def load_spec(path=None, overrides=()) -> ExperimentSpec:
    """Read a config file (optional) and apply ``key=value`` overrides."""
    values = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        values.update(parse_assignments(text.splitlines(), str(path)))
    values.update(parse_assignments(overrides, "--set"))
    return ExperimentSpec(**values)


def dump_spec(spec: ExperimentSpec) -> str:
    return "".join(f"{f} = {_format_value(getattr(spec, f))}\n" for f in _FIELDS)


def with_overrides(spec: ExperimentSpec, **changes) -> ExperimentSpec:
    return replace(spec, **changes)
