"""Independent oracle implementations shared across test modules.

These deliberately recompute results through different code paths than the
library (per-bit quadrant descent, fsum summation, all-pairs distance
checks) so agreement is meaningful.
"""

from __future__ import annotations

import math

import numpy as np

from kdecoreset.kde import GridSpec


def quantize_scalar(c: float, bits: int) -> int:
    q = math.floor(c * (1 << bits))
    return min(max(q, 0), (1 << bits) - 1)


def quadrant_compare(p, q, bits: int) -> int:
    """Compare two normalized points by recursive quadrant descent.

    Quadrants order lower-left < lower-right < upper-left < upper-right at
    every level, i.e. the y bit outranks the x bit.
    """
    px, py = quantize_scalar(p[0], bits), quantize_scalar(p[1], bits)
    qx, qy = quantize_scalar(q[0], bits), quantize_scalar(q[1], bits)
    for level in range(bits - 1, -1, -1):
        cp = (((py >> level) & 1) << 1) | ((px >> level) & 1)
        cq = (((qy >> level) & 1) << 1) | ((qx >> level) & 1)
        if cp != cq:
            return -1 if cp < cq else 1
    return 0


def quadtree_traversal_order(points: np.ndarray, bits: int) -> list[int]:
    """Sort indices with an explicit recursive quadtree traversal."""

    def recurse(indices: list[int], level: int) -> list[int]:
        if len(indices) <= 1 or level < 0:
            return indices
        buckets: list[list[int]] = [[], [], [], []]
        for i in indices:
            x = quantize_scalar(points[i, 0], bits)
            y = quantize_scalar(points[i, 1], bits)
            c = (((y >> level) & 1) << 1) | ((x >> level) & 1)
            buckets[c].append(i)
        out: list[int] = []
        for bucket in buckets:
            out.extend(recurse(bucket, level - 1))
        return out

    return recurse(list(range(len(points))), bits - 1)


def naive_bit_reverse(value: int, bits: int) -> int:
    out = 0
    for _ in range(bits):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def kde_brute(points: np.ndarray, query, sigma: float) -> float:
    """Independent KDE summation: per-term math.exp folded with fsum."""
    inv = 1.0 / (sigma * sigma)
    qx, qy = float(query[0]), float(query[1])
    terms = [
        math.exp(-((px - qx) ** 2 + (py - qy) ** 2) * inv)
        for px, py in points.tolist()
    ]
    return math.fsum(terms) / len(points)


def denoise_pairwise(
    values: np.ndarray,
    grid: GridSpec,
    percentage: float,
    radius: float,
    reference_max: float | None = None,
) -> np.ndarray:
    """Kept-mask by evaluating every (pixel, threshold pixel) pair."""
    ref = float(values.max()) if reference_max is None else reference_max
    eps_abs = percentage * ref
    high_r, high_c = np.nonzero(values >= eps_abs)
    h, w = values.shape
    kept = np.zeros((h, w), dtype=bool)
    if high_r.size == 0:
        return kept
    pitch_x, pitch_y = grid.pitch
    px2 = pitch_x * pitch_x
    py2 = pitch_y * pitch_y
    r2 = radius * radius
    cols = np.arange(w, dtype=np.float64)
    dx2px2 = (high_c[None, :] - cols[:, None]) ** 2 * px2  # (col, high)
    for row in range(h):
        dy2py2 = (high_r.astype(np.float64) - row) ** 2 * py2  # (high,)
        kept[row] = ((dy2py2[None, :] + dx2px2) <= r2).any(axis=1)
    return kept


def dyadic_balance_violations(padded_prefix: np.ndarray, m: int) -> int:
    """Count violations of the dyadic balance property on a padded prefix.

    For every level l (block size N / 2^l, D = 2^l blocks) and every prefix
    length k, each block's selection count must be floor(k / D) or
    ceil(k / D).  Equivalently: the j-th selection from a block must land in
    position round j (positions j*D .. (j+1)*D - 1), and no block may fall
    behind floor(len / D) recorded selections.
    """
    seq = np.asarray(padded_prefix, dtype=np.int64)
    length = len(seq)
    violations = 0
    for level in range(m + 1):
        blocks_count = 1 << level
        shift = m - level
        blocks = seq >> shift
        order = np.lexsort((np.arange(length), blocks))
        b_sorted = blocks[order]
        p_sorted = np.arange(length, dtype=np.int64)[order]
        counts = np.bincount(blocks, minlength=blocks_count)
        starts = np.concatenate([[0], np.cumsum(counts[np.unique(blocks)])[:-1]])
        j = np.arange(length) - np.repeat(starts, counts[np.unique(blocks)])
        violations += int(np.sum(p_sorted // blocks_count != j))
        violations += int(np.sum(counts < length // blocks_count))
    return violations
