"""Per-step timing: the n sweep at fixed d, then d doubled at fixed n and |Omega|."""
import argparse
from pathlib import Path

from grouse import csvio
from grouse.bench import bench_linear_scaling, growth_ratios, time_interleaved


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/bench_scaling"))
    ap.add_argument("--steps", type=int, default=2000)
    args = ap.parse_args()
    points = bench_linear_scaling(d=10, steps=args.steps)
    for p, r in zip(points[1:], growth_ratios(points)):
        print(f"n={p.n}: {p.median_ns:.0f} ns/step, x{r:.2f} over n={p.n // 2}")
    d_points = time_interleaved([(2000, d, 340) for d in (5, 10, 20, 40)], steps=args.steps)
    for a, b in zip(d_points, d_points[1:]):
        print(f"d {a.d} -> {b.d}: x{b.median_ns / a.median_ns:.2f}")
    csvio.write_table(
        args.out / "bench_scaling.csv", ["n", "d", "n_observed", "median_ns", "steps"],
        [(p.n, p.d, p.n_observed, p.median_ns, p.steps) for p in points + d_points],
    )


if __name__ == "__main__":
    main()
