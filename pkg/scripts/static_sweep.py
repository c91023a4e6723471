"""Final and steady-state error of static tracking over a grid of C and noise.

Diminishing steps C/t by default; ``--constant`` sweeps constant steps instead.
Writes one row per (noise, step) pair to ``static_sweep.csv``.
"""
import argparse
from pathlib import Path

import numpy as np
from _common import config

from grouse import csvio
from grouse.config import load_spec
from grouse.experiments import run_experiment

DIMINISHING = (30.0, 50.0, 100.0, 200.0, 300.0, 500.0, 1000.0)
CONSTANT = (0.01, 0.02, 0.05, 0.1, 0.3)
NOISE = (0.0, 1e-5, 1e-4, 1e-3)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/static_sweep"))
    ap.add_argument("--constant", action="store_true")
    ap.add_argument("--horizon", type=int, default=14000)
    args = ap.parse_args()
    name = "static_constant" if args.constant else "static"
    steps = CONSTANT if args.constant else DIMINISHING
    rows = []
    for omega in NOISE:
        for c in steps:
            run_dir = args.out / f"omega{omega:g}_c{c:g}"
            spec = load_spec(config(name), [f"noise_std={omega}", f"step_c={c}", f"horizon={args.horizon}"])
            summary = run_experiment(spec, run_dir)
            tel = csvio.read_telemetry(summary.outputs["telemetry"])
            steady = float(np.mean([r.subspace_error for r in tel[-10:]]))
            rows.append((omega, c, summary.final_error, steady))
            print(f"omega={omega:g} step={c:g} final={summary.final_error:.3e} steady={steady:.3e}", flush=True)
    csvio.write_table(args.out / "static_sweep.csv", ["noise_std", "step_c", "final_error", "steady_error"], rows)


if __name__ == "__main__":
    main()
