#!/usr/bin/env python3
"""Build demo datasets for the explorer UI.

Writes two priority-ordered KDCS files into --out-dir:

* synthetic.kdcs  - the multi-scale synthetic dataset
* planted.kdcs    - a dense cluster plus ten far singletons forced into a
                    500-point random sample; its full KDE shows exactly the
                    kind of isolated low-density blobs the zap workflow
                    removes

Then start the service and point the UI at it:

    python3 -m kdecoreset.cli serve --port 8787 --static frontend/dist
    # or: kdecoreset serve ...
"""

import argparse
from pathlib import Path

import numpy as np

from kdecoreset import ingest, ordering, zorder


def save_ordered(points: np.ndarray, path: Path, seed: int) -> None:
    ps = ingest.PointSet(points=points)
    zperm = zorder.zorder_sort(ps.normalized())
    order = ordering.apply_to_sorted(
        ordering.bit_reverse_permute(len(ps), seed=seed), zperm
    )
    ingest.save_priority_dataset(ps, order, path)
    print(f"wrote {path} ({len(ps)} points, mask {order.mask})")


def planted_subset(seed: int) -> np.ndarray:
    rng = np.random.default_rng(424242)
    cluster = rng.normal([0.45, 0.5], 0.0025, size=(99_990, 2))
    angles = np.linspace(0.0, 2.0 * np.pi, 10, endpoint=False)
    singletons = np.column_stack(
        [0.5 + 0.42 * np.cos(angles), 0.5 + 0.42 * np.sin(angles)]
    )
    idx = ordering.random_sample(len(cluster), 490, seed=seed)
    return np.vstack([cluster[idx], singletons])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="demo-data")
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--target-count", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    scale = ingest.calibrate_synth_scale(args.depth, args.target_count)
    synth = ingest.synth_generate(args.depth, scale)
    save_ordered(synth.points, out / "synthetic.kdcs", seed=args.seed)

    save_ordered(planted_subset(args.seed), out / "planted.kdcs", seed=args.seed)

    print(
        "\nnext: python3 -m kdecoreset.cli serve --port 8787\n"
        f"then register a dataset, e.g.\n"
        f"  curl -X POST localhost:8787/datasets "
        f"-H 'content-type: application/json' "
        f"-d '{{\"path\": \"{(out / 'planted.kdcs').resolve()}\"}}'"
    )


if __name__ == "__main__":
    main()
