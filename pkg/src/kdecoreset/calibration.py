"""Empirical measurement of subset quality and constant calibration.

The size formulas carry unknown constant factors; these helpers measure the
actual grid L-infinity error of coreset prefixes and random samples against
the full-data raster, and search for the smallest constant that meets an
(eps, delta) target over repeated trials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ordering
from .kde import DensityRaster, GridSpec, KernelParams, error_report, kde_raster


def subset_linf(
    full_raster: DensityRaster,
    points: np.ndarray,
    subset_idx: np.ndarray,
) -> float:
    """Grid L-infinity distance between the full raster and a subset's KDE."""
    sub = kde_raster(
        points[subset_idx], full_raster.grid, full_raster.kernel
    )
    return error_report(full_raster, sub).linf


@dataclass
class SizeErrorRow:
    size: int
    rs_err: float
    coreset_err: float


def compare_sizes(
    points: np.ndarray,
    sizes: list[int],
    trials: int,
    kernel: KernelParams,
    grid: GridSpec,
    seed: int = 0,
    full_raster: DensityRaster | None = None,
) -> list[SizeErrorRow]:
    """Median-over-trials L-inf error of RS vs coreset prefixes per size.

    ``points`` must already be normalized; Z-order sorting happens here so
    coreset trials can vary the priority mask.
    """
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if full_raster is None:
        full_raster = kde_raster(points, grid, kernel)
    from .zorder import zorder_sort

    zperm = zorder_sort(points)
    rows = []
    for size in sizes:
        rs_errs = []
        cs_errs = []
        for trial in range(trials):
            rs_idx = ordering.random_sample(n, size, seed=seed + 1000 + trial)
            rs_errs.append(subset_linf(full_raster, points, rs_idx))
            order = ordering.bit_reverse_permute(n, seed=seed + 2000 + trial)
            prefix = ordering.extract_coreset(order, size)
            cs_errs.append(subset_linf(full_raster, points, zperm[prefix]))
        rows.append(
            SizeErrorRow(
                size=size,
                rs_err=float(np.median(rs_errs)),
                coreset_err=float(np.median(cs_errs)),
            )
        )
    return rows


def measure_success_rate(
    points: np.ndarray,
    size: int,
    eps: float,
    trials: int,
    kernel: KernelParams,
    grid: GridSpec,
    seed: int = 0,
    full_raster: DensityRaster | None = None,
) -> float:
    """Fraction of seeded RS draws of ``size`` achieving L-inf <= eps."""
    points = np.asarray(points, dtype=np.float64)
    if full_raster is None:
        full_raster = kde_raster(points, grid, kernel)
    hits = 0
    for trial in range(trials):
        idx = ordering.random_sample(len(points), size, seed=seed + trial)
        if subset_linf(full_raster, points, idx) <= eps:
            hits += 1
    return hits / trials


def calibrate_c_rs(
    points: np.ndarray,
    eps: float,
    delta: float,
    trials: int,
    kernel: KernelParams,
    grid: GridSpec,
    candidates: np.ndarray | None = None,
    seed: int = 0,
) -> float:
    """Smallest candidate c_rs whose formula size succeeds in >= 1 - delta
    of the trials; raises if none qualifies."""
    points = np.asarray(points, dtype=np.float64)
    if candidates is None:
        candidates = np.geomspace(0.05, 50.0, 12)
    full = kde_raster(points, grid, kernel)
    n = len(points)
    for c in np.sort(np.asarray(candidates, dtype=np.float64)):
        spec = ordering.CoresetSpec(eps=eps, delta=delta, c_rs=float(c))
        size = min(n, ordering.random_sample_size_for_eps(spec))
        rate = measure_success_rate(
            points, size, eps, trials, kernel, grid, seed=seed, full_raster=full
        )
        if rate >= 1.0 - delta:
            return float(c)
    raise ValueError("no candidate constant met the success target")
