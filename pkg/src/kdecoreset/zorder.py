"""Morton (Z-order) encoding and sorting of normalized 2-D points.

The Z-order curve linearizes the unit square so that ascending code order
visits the four quadrants lower-left, lower-right, upper-left, upper-right,
recursively.  Coordinates are quantized to ``bits_per_axis`` bits and the
bits of x and y are interleaved, x in the even positions (starting at bit 0)
and y in the odd positions, which produces exactly that quadrant order when
codes are compared as unsigned integers.
"""

from __future__ import annotations

import numpy as np

DEFAULT_BITS_PER_AXIS = 31

_SPREAD_MASKS = (
    (16, np.uint64(0x0000FFFF0000FFFF)),
    (8, np.uint64(0x00FF00FF00FF00FF)),
    (4, np.uint64(0x0F0F0F0F0F0F0F0F)),
    (2, np.uint64(0x3333333333333333)),
    (1, np.uint64(0x5555555555555555)),
)


def _spread(v: np.ndarray) -> np.ndarray:
    """Spread the low 32 bits of each value into the even bit positions."""
    v = v.astype(np.uint64) & np.uint64(0xFFFFFFFF)
    for shift, mask in _SPREAD_MASKS:
        v = (v | (v << np.uint64(shift))) & mask
    return v


_COMPACT_STEPS = (
    (1, np.uint64(0x3333333333333333)),
    (2, np.uint64(0x0F0F0F0F0F0F0F0F)),
    (4, np.uint64(0x00FF00FF00FF00FF)),
    (8, np.uint64(0x0000FFFF0000FFFF)),
    (16, np.uint64(0x00000000FFFFFFFF)),
)


def _compact(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_spread`: gather the even bit positions."""
    v = v.astype(np.uint64) & np.uint64(0x5555555555555555)
    for shift, mask in _COMPACT_STEPS:
        v = (v | (v >> np.uint64(shift))) & mask
    return v


def quantize(coords: np.ndarray, bits_per_axis: int) -> np.ndarray:
    """Quantize coordinates in [0, 1] to ``bits_per_axis``-bit integers.

    Uses floor(c * 2^B) clamped to 2^B - 1, so 1.0 maps to the top cell.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.size and (np.min(coords) < 0.0 or np.max(coords) > 1.0):
        raise ValueError("coordinates must lie in [0, 1]")
    scale = float(1 << bits_per_axis)
    q = np.floor(coords * scale)
    np.clip(q, 0, scale - 1, out=q)
    return q.astype(np.uint64)


def morton_encode_array(
    x: np.ndarray, y: np.ndarray, bits_per_axis: int = DEFAULT_BITS_PER_AXIS
) -> np.ndarray:
    """Morton codes for arrays of normalized coordinates."""
    if not 1 <= bits_per_axis <= 31:
        raise ValueError("bits_per_axis must be in [1, 31]")
    qx = quantize(x, bits_per_axis)
    qy = quantize(y, bits_per_axis)
    return _spread(qx) | (_spread(qy) << np.uint64(1))


def morton_encode(
    x: float, y: float, bits_per_axis: int = DEFAULT_BITS_PER_AXIS
) -> int:
    """Morton code of a single normalized point (x, y)."""
    code = morton_encode_array(np.array([x]), np.array([y]), bits_per_axis)
    return int(code[0])


def morton_decode_array(codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Recover the quantized (x, y) lattice coordinates from Morton codes."""
    codes = np.asarray(codes, dtype=np.uint64)
    return _compact(codes), _compact(codes >> np.uint64(1))


def morton_decode(code: int) -> tuple[int, int]:
    qx, qy = morton_decode_array(np.array([code], dtype=np.uint64))
    return int(qx[0]), int(qy[0])


def zorder_sort(
    points: np.ndarray, bits_per_axis: int = DEFAULT_BITS_PER_AXIS
) -> np.ndarray:
    """Indices that sort normalized points into Z-order.

    Ties (identical quantized codes) keep their input order, which makes the
    result deterministic and suitable for golden tests.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        return np.empty(0, dtype=np.int64)
    codes = morton_encode_array(points[:, 0], points[:, 1], bits_per_axis)
    return np.argsort(codes, kind="stable").astype(np.int64)
