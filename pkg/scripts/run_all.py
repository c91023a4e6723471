"""Run every checked-in synthetic experiment config and print the summaries.

The recorded-stream config needs external data and is skipped unless
``--sensor-csv`` is given.
"""
import argparse
from pathlib import Path

from _common import CONFIGS

from grouse.config import load_spec
from grouse.experiments import run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--sensor-csv", type=Path)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for path in sorted(CONFIGS.glob("*.cfg")):
        overrides = [f"seed={args.seed}"]
        if path.stem == "chlorine":
            if args.sensor_csv is None:
                print("chlorine: skipped (no --sensor-csv)")
                continue
            overrides.append(f"input_path={args.sensor_csv}")
        spec = load_spec(path, overrides)
        print(run_experiment(spec, args.out / path.stem).line(), flush=True)


if __name__ == "__main__":
    main()
