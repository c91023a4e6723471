"""Switching-subspace runs for several constant steps.

Reports how many steps each run needs after a switch to get back within 2x
of the median error over the 500 steps before it.
"""
import argparse
from pathlib import Path

import numpy as np
from _common import config

from grouse import csvio
from grouse.config import load_spec
from grouse.experiments import run_experiment


def reconvergence(tel, switches, horizon):
    t = np.array([r.t for r in tel])
    err = np.array([r.subspace_error for r in tel])
    out = []
    for s, nxt in zip(switches, list(switches[1:]) + [horizon + 1]):
        floor = np.median(err[(t >= s - 500) & (t < s)])
        after = (t >= s) & (t < nxt) & (err <= 2 * floor)
        out.append(int(t[after][0] - s) if after.any() else -1)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/switching_steps"))
    ap.add_argument("--steps", type=float, nargs="+", default=[0.03, 0.05, 0.1])
    args = ap.parse_args()
    rows = []
    for eta in args.steps:
        spec = load_spec(config("switching"), [f"step_c={eta}", "report_every=1"])
        summary = run_experiment(spec, args.out / f"eta{eta:g}")
        tel = csvio.read_telemetry(summary.outputs["telemetry"])
        times = reconvergence(tel, spec.switch_times, spec.horizon)
        rows.append((eta, *times))
        print(f"eta={eta:g} reconvergence steps {times}", flush=True)
    header = ["eta"] + [f"after_{s}" for s in spec.switch_times]
    csvio.write_table(args.out / "reconvergence.csv", header, rows)


if __name__ == "__main__":
    main()
