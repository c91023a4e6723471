"""Write a synthetic sensor-like stream CSV for the recorded-stream config.

    python scripts/make_standin_stream.py data/standin.csv
    grouse run configs/chlorine.cfg --set input_path=data/standin.csv
"""
import argparse
from pathlib import Path

from grouse import csvio
from grouse.streamgen import sensor_like_stream


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("path", type=Path)
    ap.add_argument("--rows", type=int, default=4310)
    ap.add_argument("--n", type=int, default=166)
    ap.add_argument("--d", type=int, default=6)
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--missing", type=float, default=0.0, help="fraction of cells left empty")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    data = sensor_like_stream(args.rows, args.n, args.d, args.noise, args.missing, seed=args.seed)
    # NaN cells are written empty
    csvio.write_stream_csv(args.path, data, names=[f"s{i}" for i in range(args.n)])
    print(f"wrote {args.rows} x {args.n} stream to {args.path}")


if __name__ == "__main__":
    main()
