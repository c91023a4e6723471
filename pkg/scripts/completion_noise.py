"""Matrix completion error per pass at several noise levels."""
import argparse
from pathlib import Path

from _common import config

from grouse import csvio
from grouse.config import load_spec
from grouse.experiments import run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/completion_noise"))
    ap.add_argument("--noise", type=float, nargs="+", default=[0.0, 1e-3, 1e-2, 1e-1])
    args = ap.parse_args()
    rows = []
    for omega in args.noise:
        spec = load_spec(config("completion"), [f"noise_std={omega}"])
        summary = run_experiment(spec, args.out / f"omega{omega:g}")
        _, hist = csvio.read_table(summary.outputs["passes"])
        for k, _, rms, err in hist:
            rows.append((omega, int(k), rms, err))
        print(f"omega={omega:g} final relative error {summary.final_error:.3e}", flush=True)
    csvio.write_table(args.out / "completion_noise.csv", ["noise_std", "pass", "observed_rms", "relative_error"], rows)


if __name__ == "__main__":
    main()
