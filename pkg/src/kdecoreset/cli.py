"""Batch entry points for the pipeline.

Subcommands: synth, order, raster, compare, denoise, serve.  Every command
is deterministic given its full flag set (seeds included).  Exit codes:
0 success, 1 usage error, 2 data error.  Machine-readable results are
printed as key=value lines and optionally written as JSON via --json.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import calibration, denoise, ingest, kde, ordering, zorder

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits with 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_config(path: str) -> dict[str, str]:
    """key=value defaults file; '#' comments and blank lines ignored."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _emit(pairs: dict, json_path: str | None) -> None:
    for key, value in pairs.items():
        print(f"{key}={value}")
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(pairs, fh, indent=2, default=str)
            fh.write("\n")


def _parse_mask(text: str | None) -> int | None:
    if text is None:
        return None
    return int(text, 0)


def cmd_synth(args) -> int:
    if args.target_count is not None:
        scale = ingest.calibrate_synth_scale(args.depth, args.target_count)
    else:
        scale = args.scale
    ps = ingest.synth_generate(args.depth, scale, seed=args.seed)
    ingest.save_text_points(ps.points, args.out)
    _emit(
        {"count": len(ps), "depth": args.depth, "scale": scale, "out": args.out},
        args.json,
    )
    return EXIT_OK


def cmd_order(args) -> int:
    ps = ingest.load_points(args.input, format=args.format, swap=args.swap)
    if ps.skipped:
        print(f"skipped_lines={ps.skipped}", file=sys.stderr)
    zperm = zorder.zorder_sort(ps.normalized(), args.bits)
    n = len(ps)
    if args.method == ordering.METHOD_BIT_REVERSAL:
        rank_order = ordering.bit_reverse_permute(
            n, mask=_parse_mask(args.mask), seed=args.seed
        )
    else:
        rank_order = ordering.tree_priority_reorder(n, seed=args.seed)
    full_order = ordering.apply_to_sorted(rank_order, zperm)
    ingest.save_priority_dataset(ps, full_order, args.out, bits_per_axis=args.bits)
    if args.text_out:
        ingest.save_text_points(
            ps.points[full_order.permutation], args.text_out
        )
    _emit(
        {
            "source_count": n,
            "padded_count": full_order.padded_count,
            "mask": full_order.mask if full_order.mask is not None else "",
            "seed": full_order.seed,
            "method": full_order.method,
            "out": args.out,
        },
        args.json,
    )
    return EXIT_OK


def _resolve_k(args, count: int) -> int:
    if (args.k is None) == (args.eps is None):
        raise SystemExit(EXIT_USAGE)
    if args.k is not None:
        if not 1 <= args.k <= count:
            raise ValueError(f"k must be in [1, {count}]")
        return args.k
    spec = ordering.CoresetSpec(
        eps=args.eps, delta=args.delta, c_coreset=args.c_coreset
    )
    return min(count, ordering.coreset_size_for_eps(spec))


def _grid(args) -> kde.GridSpec:
    return kde.GridSpec(width=args.width, height=args.height)


def cmd_raster(args) -> int:
    ps, meta = ingest.load_priority_dataset(args.kdcs)
    k = _resolve_k(args, meta.source_count)
    pts = ps.normalized()[:k]
    raster = kde.kde_raster(pts, _grid(args), kde.KernelParams(args.sigma))
    kde.save_raster(raster, args.out)
    if not args.no_png:
        full = kde.kde_raster(
            ps.normalized(), raster.grid, raster.kernel
        ) if k < meta.source_count else raster
        image = kde.transfer_map(
            raster,
            colormap=args.colormap,
            floor_fraction=args.floor,
            reference_max=full.max(),
        )
        kde.save_png(image, args.out + ".png")
    _emit(
        {"k": k, "width": args.width, "height": args.height, "out": args.out},
        args.json,
    )
    return EXIT_OK


def cmd_compare(args) -> int:
    ps, meta = ingest.load_priority_dataset(args.kdcs)
    sizes = [int(s) for s in args.sizes.split(",")]
    if any(not 1 <= s <= meta.source_count for s in sizes):
        raise ValueError(f"sizes must be in [1, {meta.source_count}]")
    rows = calibration.compare_sizes(
        ps.normalized(),
        sizes,
        trials=args.trials,
        kernel=kde.KernelParams(args.sigma),
        grid=_grid(args),
        seed=args.seed,
    )
    print(f"{'Size':>8}  {'RS Err':>10}  {'Coreset Err':>12}")
    for row in rows:
        print(f"{row.size:>8}  {row.rs_err:>10.6f}  {row.coreset_err:>12.6f}")
    pairs = {}
    for row in rows:
        pairs[f"rs_err[{row.size}]"] = row.rs_err
        pairs[f"coreset_err[{row.size}]"] = row.coreset_err
    _emit(pairs, args.json)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(
                [row.__dict__ for row in rows], fh, indent=2
            )
            fh.write("\n")
    return EXIT_OK


def _parse_region(text: str) -> denoise.RegionSelection:
    parts = [float(v) for v in text.split(",")]
    if len(parts) == 4:
        return denoise.RegionSelection.rect(*parts)
    if len(parts) == 3:
        return denoise.RegionSelection.disc(*parts)
    raise ValueError("region must be x0,y0,x1,y1 or cx,cy,r")


def cmd_denoise(args) -> int:
    if args.raster:
        raster = kde.load_raster(args.raster)
    else:
        ps, meta = ingest.load_priority_dataset(args.kdcs)
        k = args.k or meta.source_count
        raster = kde.kde_raster(
            ps.normalized()[:k], _grid(args), kde.KernelParams(args.sigma)
        )
    reference = args.reference_max or raster.max()
    if args.region:
        params = denoise.suggest_params(
            raster, _parse_region(args.region), reference_max=reference
        )
    else:
        if args.percentage is None or args.radius is None:
            raise SystemExit(EXIT_USAGE)
        params = denoise.DenoiseParams(
            percentage=args.percentage, radius=args.radius
        )
    mask = denoise.denoise_mask(raster, params, reference_max=reference)
    cleaned = denoise.apply_denoise(raster, mask)
    if not mask.any():
        print("warning: all pixels suppressed", file=sys.stderr)
    kde.save_raster(cleaned, args.out)
    image = kde.transfer_map(
        cleaned,
        colormap=args.colormap,
        floor_fraction=args.floor,
        reference_max=reference,
    )
    kde.save_png(image, args.out + ".png")
    _emit(
        {
            "percentage": params.percentage,
            "radius": params.radius,
            "kept_pixels": int(mask.sum()),
            "out": args.out,
        },
        args.json,
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    app = create_app(
        ServiceConfig(max_pixels=args.max_pixels, static_dir=args.static)
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="kdecoreset")
    parser.add_argument("--config", help="key=value defaults file; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic dataset")
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--scale", type=float, default=0.0)
    p.add_argument("--target-count", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--json")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("order", help="build a priority-ordered KDCS file")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["whitespace", "csv"], default="whitespace")
    p.add_argument("--swap", action="store_true", help="input lines are y x")
    p.add_argument(
        "--method",
        choices=[ordering.METHOD_BIT_REVERSAL, ordering.METHOD_TREE],
        default=ordering.METHOD_BIT_REVERSAL,
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mask", help="override the random mask (int, 0x.. ok)")
    p.add_argument("--bits", type=int, default=31)
    p.add_argument("--out", required=True)
    p.add_argument("--text-out", help="also write a text export")
    p.add_argument("--json")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("raster", help="rasterize a coreset prefix")
    p.add_argument("--kdcs", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--c-coreset", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.02)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--colormap", default="ylorrd")
    p.add_argument("--floor", type=float, default=0.05)
    p.add_argument("--no-png", action="store_true")
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--json")
    p.set_defaults(func=cmd_raster)

    p = sub.add_parser("compare", help="RS vs coreset error table")
    p.add_argument("--kdcs", required=True)
    p.add_argument("--sizes", default="830,1890,5000,10000")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--sigma", type=float, default=0.02)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="JSON table path")
    p.add_argument("--json")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("denoise", help="suppress low-density noise")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--raster", help="raster file prefix")
    src.add_argument("--kdcs")
    p.add_argument("--k", type=int)
    p.add_argument("--sigma", type=float, default=0.02)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--percentage", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--region", help="x0,y0,x1,y1 or cx,cy,r to auto-suggest")
    p.add_argument("--reference-max", type=float)
    p.add_argument("--colormap", default="ylorrd")
    p.add_argument("--floor", type=float, default=0.05)
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--json")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--max-pixels", type=int, default=1 << 22)
    p.add_argument("--static", help="static directory for the explorer UI")
    p.set_defaults(func=cmd_serve)

    return parser


def _apply_config_defaults(parser: _Parser, argv: list[str]) -> list[str]:
    """Prepend config-file values as defaults; explicit flags win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    config = _read_config(argv[idx + 1])
    head = argv[: idx + 2]
    tail = argv[idx + 2 :]
    injected: list[str] = []
    present = {a.split("=", 1)[0] for a in tail if a.startswith("--")}
    for key, value in config.items():
        flag = f"--{key.replace('_', '-')}"
        if flag not in present:
            injected.extend([flag, value])
    if tail:
        return head + [tail[0]] + injected + tail[1:]
    return head + injected


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    argv = _apply_config_defaults(parser, argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except denoise.CannotSuppressError as exc:
        print(f"cannot suppress: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, OSError, ingest.KdcsFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
