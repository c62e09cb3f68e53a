#!/usr/bin/env python3
"""Measure RS vs coreset L-infinity error across subset sizes.

Reproduces the error-vs-size comparison on the synthetic dataset (or any
point file you pass in) and prints the table plus the per-size ratio.

    python3 scripts/error_vs_size.py --target-count 100000 \
        --sizes 830,1890,5000,10000 --trials 10 --out table.json
"""

import argparse
import json

from kdecoreset import calibration, ingest, kde


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", help="point text file; default: synthetic")
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--target-count", type=int, default=100_000)
    ap.add_argument("--sizes", default="830,1890,5000,10000")
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--sigma", type=float, default=0.02)
    ap.add_argument("--grid", type=int, default=256)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="optional JSON output path")
    args = ap.parse_args()

    if args.input:
        ps = ingest.load_points(args.input)
    else:
        scale = ingest.calibrate_synth_scale(args.depth, args.target_count)
        ps = ingest.synth_generate(args.depth, scale)
    print(f"dataset: {len(ps)} points")

    rows = calibration.compare_sizes(
        ps.normalized(),
        sizes=[int(s) for s in args.sizes.split(",")],
        trials=args.trials,
        kernel=kde.KernelParams(args.sigma),
        grid=kde.GridSpec(args.grid, args.grid),
        seed=args.seed,
    )
    print(f"{'Size':>8}  {'RS Err':>10}  {'Coreset Err':>12}  {'Ratio':>6}")
    for row in rows:
        ratio = row.rs_err / row.coreset_err if row.coreset_err else float("inf")
        print(
            f"{row.size:>8}  {row.rs_err:>10.6f}  "
            f"{row.coreset_err:>12.6f}  {ratio:>6.2f}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump([row.__dict__ for row in rows], fh, indent=2)
            fh.write("\n")


if __name__ == "__main__":
    main()
