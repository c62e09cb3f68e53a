"""HTTP facade over the engine for the explorer UI and integration tests.

Rasters are returned as raw little-endian float32 grids (row 0 at the
extent's y0) with JSON metadata in the X-Raster-Meta header, so clients
apply transfer functions locally without another round trip.  Responses are
pure functions of (registered file bytes, query parameters); identical
requests are served from an in-process cache and are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import denoise, ingest, kde, ordering

UNIT_EXTENT = (0.0, 0.0, 1.0, 1.0)
VARIANTS = ("full", "coreset", "rs")


@dataclass
class ServiceConfig:
    max_pixels: int = 1 << 22
    static_dir: str | None = None
    upload_dir: str | None = None


@dataclass
class _Dataset:
    points: np.ndarray  # normalized, priority order
    original: np.ndarray
    meta: ingest.KdcsMeta
    bbox: tuple[float, float, float, float]
    norm_scale: float
    norm_center: tuple[float, float]


@dataclass
class _State:
    config: ServiceConfig
    datasets: dict[str, _Dataset] = field(default_factory=dict)
    raster_cache: dict[tuple, np.ndarray] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _dataset_meta(ds_id: str, ds: _Dataset) -> dict[str, Any]:
    return {
        "id": ds_id,
        "count": ds.meta.source_count,
        "padded_count": ds.meta.padded_count,
        "bbox": list(ds.bbox),
        "seed": ds.meta.seed,
        "mask": ds.meta.mask,
        "method": ds.meta.method,
        "bits_per_axis": ds.meta.bits_per_axis,
        "norm_scale": ds.norm_scale,
        "norm_center": list(ds.norm_center),
    }


def _register_bytes(state: _State, raw: bytes, path: str) -> str:
    ds_id = hashlib.sha256(raw).hexdigest()[:16]
    with state.lock:
        if ds_id in state.datasets:
            return ds_id
    pointset, meta = ingest.load_priority_dataset(path)
    ds = _Dataset(
        points=pointset.normalized(),
        original=pointset.points,
        meta=meta,
        bbox=pointset.bbox,
        norm_scale=pointset.scale,
        norm_center=pointset.center,
    )
    with state.lock:
        state.datasets[ds_id] = ds
    return ds_id


def _require_dataset(state: _State, ds_id: str) -> _Dataset:
    ds = state.datasets.get(ds_id)
    if ds is None:
        raise HTTPException(status_code=404, detail=f"unknown dataset {ds_id}")
    return ds


def _parse_extent(raw: str | None) -> tuple[float, float, float, float]:
    if not raw:
        return UNIT_EXTENT
    try:
        x0, y0, x1, y1 = (float(v) for v in raw.split(","))
    except ValueError:
        raise HTTPException(status_code=400, detail="bad extent") from None
    if not (x1 > x0 and y1 > y0):
        raise HTTPException(status_code=400, detail="degenerate extent")
    return (x0, y0, x1, y1)


def _subset(
    ds: _Dataset, variant: str, k: int | None, seed: int
) -> np.ndarray:
    n = len(ds.points)
    if variant == "full":
        return ds.points
    if k is None:
        raise HTTPException(status_code=400, detail="k required")
    if not 1 <= k <= n:
        raise HTTPException(status_code=400, detail=f"k must be in [1, {n}]")
    if variant == "coreset":
        return ds.points[:k]
    idx = ordering.random_sample(n, k, seed=seed)
    return ds.points[idx]


def _raster_for(
    state: _State,
    ds_id: str,
    ds: _Dataset,
    variant: str,
    k: int | None,
    seed: int,
    sigma: float,
    width: int,
    height: int,
    extent: tuple[float, float, float, float],
) -> np.ndarray:
    key = ("raster", ds_id, variant, k, seed, sigma, width, height, extent)
    with state.lock:
        cached = state.raster_cache.get(key)
    if cached is not None:
        return cached
    pts = _subset(ds, variant, k, seed)
    grid = kde.GridSpec(width=width, height=height, extent=extent)
    values = kde.kde_raster(pts, grid, kde.KernelParams(sigma)).values
    with state.lock:
        state.raster_cache.setdefault(key, values)
        return state.raster_cache[key]


def _check_budget(state: _State, width: int, height: int) -> None:
    if width < 1 or height < 1:
        raise HTTPException(status_code=400, detail="grid dims must be >= 1")
    if width * height > state.config.max_pixels:
        raise HTTPException(
            status_code=413,
            detail=f"grid exceeds pixel budget {state.config.max_pixels}",
        )


def _check_sigma(sigma: float) -> None:
    if not (sigma > 0 and np.isfinite(sigma)):
        raise HTTPException(status_code=400, detail="sigma must be positive")


def _raster_response(values: np.ndarray, meta: dict[str, Any]) -> Response:
    return Response(
        content=np.ascontiguousarray(values, dtype="<f4").tobytes(),
        media_type="application/octet-stream",
        headers={"X-Raster-Meta": json.dumps(meta)},
    )


def _parse_region(payload: Any) -> denoise.RegionSelection:
    try:
        kind = payload["kind"]
        if kind == "rect":
            return denoise.RegionSelection.rect(
                float(payload["x0"]),
                float(payload["y0"]),
                float(payload["x1"]),
                float(payload["y1"]),
            )
        if kind == "disc":
            return denoise.RegionSelection.disc(
                float(payload["cx"]), float(payload["cy"]), float(payload["r"])
            )
    except (KeyError, TypeError, ValueError):
        raise HTTPException(status_code=400, detail="malformed region") from None
    raise HTTPException(status_code=400, detail=f"unknown region kind {kind!r}")


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    state = _State(config=config or ServiceConfig())
    app = FastAPI(title="kdecoreset service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Raster-Meta"],
    )
    app.state.engine = state

    @app.get("/datasets")
    def list_datasets():
        with state.lock:
            items = list(state.datasets.items())
        return [_dataset_meta(ds_id, ds) for ds_id, ds in items]

    @app.post("/datasets")
    async def register_dataset(request: Request):
        """Register a KDCS file, either by local path (JSON {"path": ...})
        or by uploading the raw bytes (application/octet-stream)."""
        content_type = request.headers.get("content-type", "")
        try:
            if content_type.startswith("application/octet-stream"):
                raw = await request.body()
                upload_dir = Path(
                    state.config.upload_dir or tempfile.gettempdir()
                )
                upload_dir.mkdir(parents=True, exist_ok=True)
                path = upload_dir / (
                    hashlib.sha256(raw).hexdigest()[:16] + ".kdcs"
                )
                path.write_bytes(raw)
            else:
                payload = await request.json()
                path = payload.get("path")
                if not path:
                    raise HTTPException(
                        status_code=400, detail="missing 'path'"
                    )
                with open(path, "rb") as fh:
                    raw = fh.read()
            ds_id = _register_bytes(state, raw, str(path))
        except HTTPException:
            raise
        except (OSError, ingest.KdcsFormatError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return _dataset_meta(ds_id, state.datasets[ds_id])

    @app.get("/datasets/{ds_id}")
    def dataset_meta(ds_id: str):
        return _dataset_meta(ds_id, _require_dataset(state, ds_id))

    @app.get("/raster")
    def raster(
        dataset: str,
        sigma: float,
        w: int,
        h: int,
        variant: str = "full",
        k: int | None = None,
        seed: int = 0,
        extent: str | None = None,
        denoise_percentage: float | None = None,
        denoise_radius: float | None = None,
    ):
        ds = _require_dataset(state, dataset)
        if variant not in VARIANTS:
            raise HTTPException(status_code=400, detail="bad variant")
        _check_budget(state, w, h)
        _check_sigma(sigma)
        ext = _parse_extent(extent)
        values = _raster_for(
            state, dataset, ds, variant, k, seed, sigma, w, h, ext
        )
        reference = _raster_for(
            state, dataset, ds, "full", None, 0, sigma, w, h, UNIT_EXTENT
        )
        reference_max = float(reference.max())
        meta: dict[str, Any] = {
            "width": w,
            "height": h,
            "extent": list(ext),
            "sigma": sigma,
            "variant": variant,
            "k": k,
            "seed": seed,
            "source_size": ds.meta.source_count,
            "reference_max": reference_max,
        }
        if denoise_percentage is not None:
            if denoise_radius is None:
                raise HTTPException(
                    status_code=400, detail="denoise_radius required"
                )
            try:
                params = denoise.DenoiseParams(
                    percentage=denoise_percentage, radius=denoise_radius
                )
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            grid = kde.GridSpec(width=w, height=h, extent=ext)
            raster_obj = kde.DensityRaster(
                grid=grid,
                values=values,
                kernel=kde.KernelParams(sigma),
                source_size=ds.meta.source_count,
            )
            mask = denoise.denoise_mask(
                raster_obj, params, reference_max=reference_max
            )
            values = denoise.apply_denoise(raster_obj, mask).values
            meta["denoise"] = {
                "percentage": denoise_percentage,
                "radius": denoise_radius,
                "kept_pixels": int(mask.sum()),
            }
        return _raster_response(values, meta)

    @app.get("/error")
    def error(
        dataset: str,
        sigma: float,
        w: int,
        h: int,
        variant: str = "coreset",
        kind: str = "abs",
        k: int | None = None,
        seed: int = 0,
        extent: str | None = None,
    ):
        ds = _require_dataset(state, dataset)
        if variant not in ("coreset", "rs"):
            raise HTTPException(status_code=400, detail="bad variant")
        if kind not in ("abs", "rel"):
            raise HTTPException(status_code=400, detail="bad kind")
        _check_budget(state, w, h)
        _check_sigma(sigma)
        ext = _parse_extent(extent)
        grid = kde.GridSpec(width=w, height=h, extent=ext)
        kernel = kde.KernelParams(sigma)
        full_values = _raster_for(
            state, dataset, ds, "full", None, 0, sigma, w, h, ext
        )
        approx_values = _raster_for(
            state, dataset, ds, variant, k, seed, sigma, w, h, ext
        )
        full = kde.DensityRaster(
            grid=grid, values=full_values, kernel=kernel,
            source_size=ds.meta.source_count,
        )
        approx = kde.DensityRaster(
            grid=grid, values=approx_values, kernel=kernel,
            source_size=k or ds.meta.source_count,
        )
        report = kde.error_report(full, approx)
        values = report.abs_raster if kind == "abs" else report.rel_raster
        meta = {
            "width": w,
            "height": h,
            "extent": list(ext),
            "sigma": sigma,
            "variant": variant,
            "kind": kind,
            "k": k,
            "seed": seed,
            "linf": report.linf,
            "rel_floor": report.rel_floor,
            "masked_pixels": int((~report.rel_mask).sum()),
        }
        return _raster_response(values, meta)

    @app.post("/denoise/suggest")
    def denoise_suggest(payload: dict = Body(...)):
        try:
            ds_id = payload["dataset"]
            sigma = float(payload["sigma"])
            w = int(payload["width"])
            h = int(payload["height"])
        except (KeyError, TypeError, ValueError):
            raise HTTPException(
                status_code=400, detail="missing dataset/sigma/width/height"
            ) from None
        ds = _require_dataset(state, ds_id)
        variant = payload.get("variant", "full")
        if variant not in VARIANTS:
            raise HTTPException(status_code=400, detail="bad variant")
        k = payload.get("k")
        k = int(k) if k is not None else None
        seed = int(payload.get("seed", 0))
        _check_budget(state, w, h)
        _check_sigma(sigma)
        ext = _parse_extent(payload.get("extent"))
        region = _parse_region(payload.get("region"))
        values = _raster_for(
            state, ds_id, ds, variant, k, seed, sigma, w, h, ext
        )
        reference = _raster_for(
            state, ds_id, ds, "full", None, 0, sigma, w, h, UNIT_EXTENT
        )
        raster_obj = kde.DensityRaster(
            grid=kde.GridSpec(width=w, height=h, extent=ext),
            values=values,
            kernel=kde.KernelParams(sigma),
            source_size=ds.meta.source_count,
        )
        try:
            params = denoise.suggest_params(
                raster_obj, region, reference_max=float(reference.max())
            )
        except denoise.CannotSuppressError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {"percentage": params.percentage, "radius": params.radius}

    if state.config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount(
            "/", StaticFiles(directory=state.config.static_dir, html=True)
        )

    return app
