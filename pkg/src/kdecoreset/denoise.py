"""Suppression of low-density visual noise and suggestion of its parameters.

A pixel survives de-noising iff it is within ``radius`` (domain units,
between pixel centers) of some pixel whose density reaches an absolute
threshold percentage * reference_max; a pixel at the threshold is its own
witness at distance zero.  Distances are computed with an exact two-pass
squared-distance transform whose floating-point terms match the naive
pairwise formula dy^2 * pitch_y^2 + dx^2 * pitch_x^2 operation for
operation, so masks agree exactly with a brute-force check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kde import DensityRaster, GridSpec

SUGGESTION_MARGIN = 1e-9
DEFAULT_RADIUS_CANDIDATES = 16


class CannotSuppressError(ValueError):
    """No percentage <= 1 suppresses the selected region."""


@dataclass(frozen=True)
class DenoiseParams:
    """Threshold percentage (of the reference max) and witness radius."""

    percentage: float
    radius: float

    def __post_init__(self) -> None:
        if not 0.0 < self.percentage <= 1.0:
            raise ValueError("percentage must be in (0, 1]")
        if self.radius < 0.0:
            raise ValueError("radius must be >= 0")


@dataclass(frozen=True)
class RegionSelection:
    """Axis-aligned rectangle or disc in domain units."""

    kind: str  # "rect" or "disc"
    params: tuple[float, ...]  # rect: (x0, y0, x1, y1); disc: (cx, cy, r)

    def __post_init__(self) -> None:
        if self.kind == "rect":
            x0, y0, x1, y1 = self.params
            if not (x1 > x0 and y1 > y0):
                raise ValueError("rectangle must be non-degenerate")
        elif self.kind == "disc":
            _, _, r = self.params
            if r <= 0:
                raise ValueError("disc radius must be positive")
        else:
            raise ValueError(f"unknown region kind {self.kind!r}")

    @classmethod
    def rect(cls, x0: float, y0: float, x1: float, y1: float):
        return cls("rect", (x0, y0, x1, y1))

    @classmethod
    def disc(cls, cx: float, cy: float, r: float):
        return cls("disc", (cx, cy, r))

    def pixel_mask(self, grid: GridSpec) -> np.ndarray:
        """Pixels whose centers fall inside the region."""
        xs = grid.x_centers()
        ys = grid.y_centers()
        if self.kind == "rect":
            x0, y0, x1, y1 = self.params
            in_x = (xs >= x0) & (xs <= x1)
            in_y = (ys >= y0) & (ys <= y1)
            return in_y[:, None] & in_x[None, :]
        cx, cy, r = self.params
        d2 = (ys[:, None] - cy) ** 2 + (xs[None, :] - cx) ** 2
        return d2 <= r * r


def min_sq_dist_to(seeds: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Min squared center-to-center distance from each pixel to a seed pixel.

    Column pass: per-column nearest seed row offset (integer two-scan);
    row pass: fold in column offsets.  Each candidate value is computed as
    dy^2 * pitch_y^2 + dx^2 * pitch_x^2 in exactly that association, so the
    minimum matches a direct pairwise evaluation bit for bit.  Pixels in a
    seed-free raster get +inf.
    """
    seeds = np.asarray(seeds, dtype=bool)
    h, w = seeds.shape
    pitch_x, pitch_y = grid.pitch
    px2 = pitch_x * pitch_x
    py2 = pitch_y * pitch_y

    sentinel = h + w + 1
    row_dist = np.where(seeds, 0, sentinel).astype(np.int64)
    for r in range(1, h):
        np.minimum(row_dist[r], row_dist[r - 1] + 1, out=row_dist[r])
    for r in range(h - 2, -1, -1):
        np.minimum(row_dist[r], row_dist[r + 1] + 1, out=row_dist[r])

    # dy^2 * py^2 per (pixel row, seed column); +inf where the column is empty
    g = row_dist.astype(np.float64) ** 2 * py2
    g[row_dist >= sentinel] = np.inf

    seed_cols = np.flatnonzero(seeds.any(axis=0))
    if seed_cols.size == 0:
        return np.full((h, w), np.inf)
    offsets = np.arange(w, dtype=np.float64)
    # (col, seed col') table of dx^2 * px^2; only seed-bearing columns can
    # hold the minimum, the rest are +inf and dropping them is exact.
    dx2px2 = (offsets[:, None] - offsets[None, seed_cols]) ** 2 * px2
    g = g[:, seed_cols]
    out = np.empty((h, w), dtype=np.float64)
    for r in range(h):
        out[r] = np.min(g[r][None, :] + dx2px2, axis=1)
    return out


def denoise_mask(
    raster: DensityRaster,
    params: DenoiseParams,
    reference_max: float | None = None,
) -> np.ndarray:
    """Boolean kept-mask: True where a pixel survives suppression."""
    ref = raster.max() if reference_max is None else float(reference_max)
    if ref <= 0:
        raise ValueError("reference_max must be positive")
    eps_abs = params.percentage * ref
    high = raster.values >= eps_abs
    if not high.any():
        return np.zeros_like(high)
    d2 = min_sq_dist_to(high, raster.grid)
    return d2 <= params.radius * params.radius


def apply_denoise(raster: DensityRaster, mask: np.ndarray) -> DensityRaster:
    """Zero out suppressed pixels; kept pixels are unchanged."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != raster.values.shape:
        raise ValueError("mask shape does not match raster")
    return DensityRaster(
        grid=raster.grid,
        values=np.where(mask, raster.values, 0.0),
        kernel=raster.kernel,
        source_size=raster.source_size,
    )


def default_radius_candidates(grid: GridSpec) -> np.ndarray:
    """Geometric ladder from one pixel pitch to a quarter of the diagonal."""
    pitch_x, pitch_y = grid.pitch
    x0, y0, x1, y1 = grid.extent
    lo = min(pitch_x, pitch_y)
    hi = 0.25 * float(np.hypot(x1 - x0, y1 - y0))
    if hi <= lo:
        return np.array([lo])
    return np.geomspace(lo, hi, DEFAULT_RADIUS_CANDIDATES)


def suggest_params(
    raster: DensityRaster,
    region: RegionSelection,
    reference_max: float | None = None,
    radius_candidates: np.ndarray | None = None,
) -> DenoiseParams:
    """Minimal (percentage, radius) that suppresses every pixel of ``region``.

    For each candidate radius the required threshold is the largest density
    within that distance of the region, nudged up by a relative margin so
    the region's own pixels fall strictly below it.  The candidate with the
    smallest percentage wins, ties going to the smaller radius.  Raises
    CannotSuppressError when every candidate would need percentage > 1,
    i.e. the region touches the reference maximum's neighborhood.
    """
    ref = raster.max() if reference_max is None else float(reference_max)
    if ref <= 0:
        raise ValueError("reference_max must be positive")
    region_mask = region.pixel_mask(raster.grid)
    if not region_mask.any():
        raise ValueError("region covers no pixel centers of the raster")
    if radius_candidates is None:
        radius_candidates = default_radius_candidates(raster.grid)
    radius_candidates = np.asarray(radius_candidates, dtype=np.float64)
    if radius_candidates.size == 0:
        raise ValueError("radius_candidates must be non-empty")

    d2 = min_sq_dist_to(region_mask, raster.grid)
    tiny = float(np.finfo(np.float64).tiny)
    best: tuple[float, float] | None = None
    for radius in radius_candidates:
        reach = d2 <= radius * radius
        required = float(raster.values[reach].max())
        eps_abs = max(required * (1.0 + SUGGESTION_MARGIN), tiny)
        percentage = eps_abs / ref
        if percentage > 1.0:
            continue
        if best is None or percentage < best[0]:
            best = (percentage, float(radius))
    if best is None:
        raise CannotSuppressError(
            "region cannot be suppressed: its neighborhood contains the "
            "reference maximum at every candidate radius"
        )
    return DenoiseParams(percentage=best[0], radius=best[1])
