"""Gaussian KDE evaluation, rasterization, error reports and color transfer.

The density at a query x for a point set P is mean_p exp(-|p - x|^2 / sigma^2),
so values always lie in [0, 1].  Rasters evaluate that at pixel centers.  The
accelerated raster path exploits that the kernel factors per axis: with
U[i, p] = exp(-(xs_i - px_p)^2 / s^2) and V[p, j] = exp(-(py_p - ys_j)^2 / s^2),
the raster is (1/n) * (U @ V)^T, a dense matrix product.  Per-axis factors
smaller than ``tail_eps`` are truncated to zero, which bounds the per-pixel
deviation from exact summation by tail_eps (default 1e-12) plus roundoff.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TAIL_EPS = 1e-12
DEFAULT_REL_FLOOR_FRACTION = 0.05
_POINT_CHUNK = 16384
_PIXEL_CHUNK = 2048


@dataclass(frozen=True)
class KernelParams:
    """Gaussian kernel exp(-d^2 / bandwidth^2); bandwidth in domain units."""

    bandwidth: float

    def __post_init__(self) -> None:
        if not (self.bandwidth > 0 and np.isfinite(self.bandwidth)):
            raise ValueError("bandwidth must be positive and finite")


@dataclass(frozen=True)
class GridSpec:
    """Raster geometry: pixel counts plus the domain rectangle covered."""

    width: int
    height: int
    extent: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be >= 1")
        x0, y0, x1, y1 = self.extent
        if not (x1 > x0 and y1 > y0):
            raise ValueError("extent must be non-degenerate")

    @property
    def pitch(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.extent
        return (x1 - x0) / self.width, (y1 - y0) / self.height

    def x_centers(self) -> np.ndarray:
        x0, _, x1, _ = self.extent
        return x0 + (np.arange(self.width) + 0.5) * (x1 - x0) / self.width

    def y_centers(self) -> np.ndarray:
        _, y0, _, y1 = self.extent
        return y0 + (np.arange(self.height) + 0.5) * (y1 - y0) / self.height


@dataclass
class DensityRaster:
    """KDE values on a grid; values[row, col] with row 0 at the extent's y0."""

    grid: GridSpec
    values: np.ndarray
    kernel: KernelParams
    source_size: int

    def max(self) -> float:
        return float(self.values.max())

    def same_geometry(self, other: "DensityRaster") -> bool:
        return self.grid == other.grid and self.kernel == other.kernel


@dataclass
class ErrorReport:
    """Per-pixel differences between a full raster and an approximation.

    abs_raster is full - approx; rel_raster is (full - approx) / full where
    full >= rel_floor and zero elsewhere, with rel_mask flagging the valid
    pixels.  linf is the max absolute difference over the grid, which lower
    bounds the true sup-norm over the plane.
    """

    linf: float
    abs_raster: np.ndarray
    rel_raster: np.ndarray
    rel_mask: np.ndarray
    rel_floor: float


def kde_eval(
    points: np.ndarray, query: np.ndarray, kernel: KernelParams
) -> float | np.ndarray:
    """Exact KDE at one query point (shape (2,)) or several (shape (m, 2))."""
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        raise ValueError("point set must be non-empty")
    query = np.asarray(query, dtype=np.float64)
    single = query.ndim == 1
    q = np.atleast_2d(query)
    inv_s2 = 1.0 / kernel.bandwidth**2
    d2 = (q[:, None, 0] - points[None, :, 0]) ** 2
    d2 += (q[:, None, 1] - points[None, :, 1]) ** 2
    vals = np.exp(-d2 * inv_s2).mean(axis=1)
    return float(vals[0]) if single else vals


def kde_raster(
    points: np.ndarray,
    grid: GridSpec,
    kernel: KernelParams,
    method: str = "separable",
    tail_eps: float = DEFAULT_TAIL_EPS,
) -> DensityRaster:
    """Rasterize the KDE over the grid's pixel centers.

    method "separable" is the accelerated production path; "exact" sums every
    point for every pixel and serves as the reference the accelerated path is
    checked against.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        raise ValueError("point set must be non-empty")
    if method == "separable":
        values = _raster_separable(points, grid, kernel, tail_eps)
    elif method == "exact":
        values = _raster_exact(points, grid, kernel)
    else:
        raise ValueError(f"unknown raster method {method!r}")
    return DensityRaster(
        grid=grid, values=values, kernel=kernel, source_size=len(points)
    )


def _raster_separable(
    points: np.ndarray, grid: GridSpec, kernel: KernelParams, tail_eps: float
) -> np.ndarray:
    xs = grid.x_centers()
    ys = grid.y_centers()
    inv_s2 = 1.0 / kernel.bandwidth**2
    z_cut = np.log(1.0 / tail_eps)
    acc = np.zeros((grid.width, grid.height), dtype=np.float64)
    for start in range(0, len(points), _POINT_CHUNK):
        chunk = points[start : start + _POINT_CHUNK]
        zx = (xs[:, None] - chunk[None, :, 0]) ** 2 * inv_s2
        zy = (chunk[:, None, 1] - ys[None, :]) ** 2 * inv_s2
        fx = np.where(zx > z_cut, 0.0, np.exp(-zx))
        fy = np.where(zy > z_cut, 0.0, np.exp(-zy))
        acc += fx @ fy
    return np.ascontiguousarray(acc.T) / len(points)


def _raster_exact(
    points: np.ndarray, grid: GridSpec, kernel: KernelParams
) -> np.ndarray:
    xs = grid.x_centers()
    ys = grid.y_centers()
    inv_s2 = 1.0 / kernel.bandwidth**2
    cx, cy = np.meshgrid(xs, ys)
    centers = np.column_stack([cx.ravel(), cy.ravel()])
    out = np.empty(len(centers), dtype=np.float64)
    for start in range(0, len(centers), _PIXEL_CHUNK):
        block = centers[start : start + _PIXEL_CHUNK]
        d2 = (block[:, None, 0] - points[None, :, 0]) ** 2
        d2 += (block[:, None, 1] - points[None, :, 1]) ** 2
        out[start : start + _PIXEL_CHUNK] = np.exp(-d2 * inv_s2).mean(axis=1)
    return out.reshape(grid.height, grid.width)


def error_report(
    full: DensityRaster,
    approx: DensityRaster,
    rel_floor: float | None = None,
) -> ErrorReport:
    """Absolute and relative error rasters plus their L-infinity norm."""
    if not full.same_geometry(approx):
        raise ValueError("rasters must share grid and kernel parameters")
    if rel_floor is None:
        rel_floor = DEFAULT_REL_FLOOR_FRACTION * full.max()
    diff = full.values - approx.values
    mask = full.values >= rel_floor
    rel = np.zeros_like(diff)
    np.divide(diff, full.values, out=rel, where=mask)
    return ErrorReport(
        linf=float(np.abs(diff).max()),
        abs_raster=diff,
        rel_raster=rel,
        rel_mask=mask,
        rel_floor=float(rel_floor),
    )


# --- color transfer -------------------------------------------------------

# Sequential stop tables follow the ColorBrewer palettes (light to dark);
# rdbu is diverging and meant for signed error rasters.
COLORMAPS: dict[str, tuple[tuple[int, int, int], ...]] = {
    "ylorrd": (
        (255, 255, 204), (255, 237, 160), (254, 217, 118), (254, 178, 76),
        (253, 141, 60), (252, 78, 42), (227, 26, 28), (189, 0, 38),
        (128, 0, 38),
    ),
    "ylgnbu": (
        (255, 255, 217), (237, 248, 177), (199, 233, 180), (127, 205, 187),
        (65, 182, 196), (29, 145, 192), (34, 94, 168), (37, 52, 148),
        (8, 29, 88),
    ),
    "blues": (
        (247, 251, 255), (222, 235, 247), (198, 219, 239), (158, 202, 225),
        (107, 174, 214), (66, 146, 198), (33, 113, 181), (8, 81, 156),
        (8, 48, 107),
    ),
    "greys": (
        (255, 255, 255), (240, 240, 240), (217, 217, 217), (189, 189, 189),
        (150, 150, 150), (115, 115, 115), (82, 82, 82), (37, 37, 37),
        (0, 0, 0),
    ),
    "rdbu": (
        (103, 0, 31), (178, 24, 43), (214, 96, 77), (244, 165, 130),
        (253, 219, 199), (247, 247, 247), (209, 229, 240), (146, 197, 222),
        (67, 147, 195), (33, 102, 172), (5, 48, 97),
    ),
}

BACKGROUND_RGB = (255, 255, 255)


def colormap_lookup(name: str) -> tuple[tuple[int, int, int], ...]:
    try:
        return COLORMAPS[name]
    except KeyError:
        raise ValueError(
            f"unknown colormap {name!r}; available: {sorted(COLORMAPS)}"
        ) from None


def _interp_stops(
    t: np.ndarray, stops: tuple[tuple[int, int, int], ...]
) -> np.ndarray:
    stops_arr = np.asarray(stops, dtype=np.float64)
    pos = np.linspace(0.0, 1.0, len(stops))
    rgb = np.stack(
        [np.interp(t, pos, stops_arr[:, c]) for c in range(3)], axis=-1
    )
    return np.round(rgb).astype(np.uint8)


def transfer_map(
    raster: DensityRaster,
    colormap: str | tuple[tuple[int, int, int], ...] = "ylorrd",
    floor_fraction: float = DEFAULT_REL_FLOOR_FRACTION,
    reference_max: float | None = None,
) -> np.ndarray:
    """Map density values to RGB relative to a shared reference maximum.

    Values below floor_fraction * reference_max render as the background
    color; the reference maximum itself maps to the darkest stop.  Passing
    the full dataset's raster max as reference keeps full/coreset/RS panes
    on one scale.  Returns a (height, width, 3) uint8 array, row 0 at y0.
    """
    stops = colormap_lookup(colormap) if isinstance(colormap, str) else colormap
    if len(stops) < 2:
        raise ValueError("colormap needs at least 2 stops")
    if not 0.0 <= floor_fraction < 1.0:
        raise ValueError("floor_fraction must be in [0, 1)")
    ref = raster.max() if reference_max is None else float(reference_max)
    h, w = raster.values.shape
    img = np.empty((h, w, 3), dtype=np.uint8)
    img[:] = BACKGROUND_RGB
    if ref <= 0:
        return img
    t = np.clip(raster.values / ref, 0.0, 1.0)
    shown = raster.values >= floor_fraction * ref
    colored = _interp_stops(t, stops)
    img[shown] = colored[shown]
    return img


def save_png(image: np.ndarray, path: str | os.PathLike) -> None:
    """Write an RGB image array as PNG, flipping so y increases upward."""
    from PIL import Image

    Image.fromarray(image[::-1], "RGB").save(path)


# --- raster file round trip -----------------------------------------------

RASTER_DATA_SUFFIX = ".f32"
RASTER_META_SUFFIX = ".meta"


def save_raster(raster: DensityRaster, prefix: str | os.PathLike) -> None:
    """Write <prefix>.f32 (little-endian float32, row-major from y0) and a
    key=value sidecar <prefix>.meta describing the grid."""
    prefix = os.fspath(prefix)
    raster.values.astype("<f4").tofile(prefix + RASTER_DATA_SUFFIX)
    x0, y0, x1, y1 = raster.grid.extent
    lines = [
        f"width={raster.grid.width}",
        f"height={raster.grid.height}",
        f"extent={x0!r} {y0!r} {x1!r} {y1!r}",
        f"sigma={raster.kernel.bandwidth!r}",
        f"source_size={raster.source_size}",
        "dtype=float32-le",
        "layout=row-major, row 0 at y0",
    ]
    with open(prefix + RASTER_META_SUFFIX, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_raster(prefix: str | os.PathLike) -> DensityRaster:
    prefix = os.fspath(prefix)
    meta: dict[str, str] = {}
    with open(prefix + RASTER_META_SUFFIX, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and "=" in line:
                key, value = line.split("=", 1)
                meta[key.strip()] = value.strip()
    width = int(meta["width"])
    height = int(meta["height"])
    extent = tuple(float(v) for v in meta["extent"].split())
    grid = GridSpec(width=width, height=height, extent=extent)
    data = np.fromfile(prefix + RASTER_DATA_SUFFIX, dtype="<f4")
    if data.size != width * height:
        raise ValueError(
            f"raster file has {data.size} values, expected {width * height}"
        )
    return DensityRaster(
        grid=grid,
        values=data.astype(np.float64).reshape(height, width),
        kernel=KernelParams(bandwidth=float(meta["sigma"])),
        source_size=int(meta["source_size"]),
    )
