"""Dataset loading, unit-square normalization, synthesis and persistence.

Text input is one point per line ("x y" whitespace- or comma-separated,
'#' comments skipped); malformed lines are counted and skipped rather than
aborting the load.  Normalization is aspect preserving: one uniform scale
maps the bounding box into [0,1]^2 centered, so Euclidean distances (and
hence Gaussian kernels) are not distorted.

Priority-ordered datasets persist in the little-endian binary KDCS format:

    offset  size  field
    0       4     magic "KDCS"
    4       2     format version (currently 1), u16
    6       1     method tag: 0 = bit_reversal, 1 = tree, u8
    7       1     flags: bit 0 set when a mask is present, u8
    8       8     source_count, u64
    16      8     padded_count, u64
    24      4     bits_per_axis, u32
    28      4     reserved (zero), u32
    32      8     seed, u64
    40      8     mask (zero when absent), u64
    48      -     source_count points, x then y as f64, priority order,
                  original (pre-normalization) coordinates

A plain-text export (one "x y" line per point, priority order) is also
available for consumers that do not speak the binary format.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .ordering import (
    METHOD_BIT_REVERSAL,
    METHOD_TREE,
    PriorityOrdering,
)

KDCS_MAGIC = b"KDCS"
KDCS_VERSION = 1
_HEADER = struct.Struct("<4sHBBQQIIQQ")
_METHOD_TAGS = {METHOD_BIT_REVERSAL: 0, METHOD_TREE: 1}
_TAG_METHODS = {v: k for k, v in _METHOD_TAGS.items()}


class KdcsFormatError(ValueError):
    """Structural problem in a KDCS file; carries the byte offset."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


@dataclass
class PointSet:
    """2-D points in original units plus their unit-square normalization."""

    points: np.ndarray
    skipped: int = 0
    bbox: tuple[float, float, float, float] = field(init=False)
    scale: float = field(init=False)
    center: tuple[float, float] = field(init=False)

    def __post_init__(self) -> None:
        self.points = np.ascontiguousarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise ValueError("points must have shape (n, 2)")
        if len(self.points) < 1:
            raise ValueError("point set must contain at least one point")
        xmin, ymin = self.points.min(axis=0)
        xmax, ymax = self.points.max(axis=0)
        self.bbox = (float(xmin), float(ymin), float(xmax), float(ymax))
        side = max(xmax - xmin, ymax - ymin)
        self.scale = 1.0 / side if side > 0 else 1.0
        self.center = (float(xmin + xmax) / 2.0, float(ymin + ymax) / 2.0)

    def __len__(self) -> int:
        return len(self.points)

    def normalized(self) -> np.ndarray:
        """Points mapped into [0,1]^2 (uniform scale, centered)."""
        out = (self.points - np.array(self.center)) * self.scale + 0.5
        np.clip(out, 0.0, 1.0, out=out)
        return out

    def denormalize(self, normalized: np.ndarray) -> np.ndarray:
        return (np.asarray(normalized) - 0.5) / self.scale + np.array(
            self.center
        )


def load_points(
    path: str | os.PathLike,
    format: str = "whitespace",
    swap: bool = False,
) -> PointSet:
    """Parse a coordinate text file tolerantly.

    Lines must provide at least two numeric fields (x then y; ``swap``
    exchanges them for lat/lon-ordered files).  Malformed lines are skipped
    and counted in the returned set's ``skipped`` attribute.
    """
    if format not in ("whitespace", "csv"):
        raise ValueError("format must be 'whitespace' or 'csv'")
    sep = None if format == "whitespace" else ","
    xs: list[float] = []
    ys: list[float] = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(sep)
            try:
                x = float(fields[0])
                y = float(fields[1])
            except (ValueError, IndexError):
                skipped += 1
                continue
            xs.append(x)
            ys.append(y)
    if not xs:
        raise ValueError(f"no valid points in {os.fspath(path)!r}")
    pts = np.column_stack([ys, xs] if swap else [xs, ys])
    return PointSet(points=pts, skipped=skipped)


def save_text_points(points: np.ndarray, path: str | os.PathLike) -> None:
    """One "x y" line per point, repr-formatted so reload is bit exact."""
    rows = np.asarray(points, dtype=np.float64).tolist()
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(f"{x!r} {y!r}\n" for x, y in rows)


# --- synthetic dataset ------------------------------------------------------

# Relative template shared by every rectangle: its 4 corners and 4 interior
# anchors, plus the non-uniform 3-way axis splits the recursion uses.
_TEMPLATE = np.array(
    [
        (0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0),
        (0.5, 0.5), (0.5, 0.8), (0.8, 0.5), (0.8, 0.8),
    ]
)
_SPLITS = (0.0, 0.5, 0.8, 1.0)


def _split_intervals(lo: np.ndarray, hi: np.ndarray):
    """Children of each interval under the non-uniform 3-way split, in order."""
    w = hi - lo
    child_lo = (lo[:, None] + np.array(_SPLITS[:3]) * w[:, None]).ravel()
    child_hi = (lo[:, None] + np.array(_SPLITS[1:]) * w[:, None]).ravel()
    return child_lo, child_hi


def _level_rects(depth: int):
    """Per level, flat arrays (x0, y0, w, h) of every rectangle, row-major
    over (y interval, x interval).  Both axes share the same interval tree."""
    lo = np.array([0.0])
    hi = np.array([1.0])
    for level in range(1, depth + 1):
        n = lo.size
        w = hi - lo
        x0 = np.tile(lo, n)
        wout = np.tile(w, n)
        y0 = np.repeat(lo, n)
        hout = np.repeat(w, n)
        yield x0, y0, wout, hout
        if level < depth:
            lo, hi = _split_intervals(lo, hi)


def _replications(scale: float, perimeters: np.ndarray) -> np.ndarray:
    return np.maximum(
        1, np.floor(scale * perimeters + 0.5).astype(np.int64)
    )


def synth_generate(
    depth: int, base_count_scale: float = 0.0, seed: int = 0
) -> PointSet:
    """Multi-scale synthetic dataset in the unit square.

    The unit square is split recursively into 9 sub-rectangles (both axes cut
    at relative 0.5 and 0.8).  Every rectangle visited contributes its 8
    template points, replicated max(1, round(base_count_scale * perimeter))
    times, so larger rectangles carry proportionally more weight.  The
    construction is deterministic; ``seed`` is accepted for interface
    symmetry with the randomized generators but currently unused.
    """
    del seed
    if depth < 1:
        raise ValueError("depth must be >= 1")
    chunks = []
    for x0, y0, w, h in _level_rects(depth):
        pts = _TEMPLATE[None, :, :] * np.stack([w, h], axis=1)[:, None, :]
        pts += np.stack([x0, y0], axis=1)[:, None, :]
        reps = _replications(base_count_scale, 2.0 * (w + h))
        chunks.append(np.repeat(pts, reps, axis=0).reshape(-1, 2))
    return PointSet(points=np.concatenate(chunks))


def synth_count(depth: int, base_count_scale: float) -> int:
    """Point count of synth_generate without materializing the points."""
    total = 0
    for _, _, w, h in _level_rects(depth):
        total += 8 * int(_replications(base_count_scale, 2.0 * (w + h)).sum())
    return total


def calibrate_synth_scale(
    depth: int, target_count: int, hi: float = 4096.0
) -> float:
    """Bisect base_count_scale so synth_generate lands nearest target_count.

    The count is a nondecreasing step function of the scale; the returned
    scale gives the achievable count closest to the target.
    """
    lo = 0.0
    if synth_count(depth, lo) >= target_count:
        return lo
    while synth_count(depth, hi) < target_count:
        hi *= 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if synth_count(depth, mid) < target_count:
            lo = mid
        else:
            hi = mid
    below, above = synth_count(depth, lo), synth_count(depth, hi)
    return lo if target_count - below <= above - target_count else hi


# --- KDCS persistence -------------------------------------------------------


def save_priority_dataset(
    pointset: PointSet,
    ordering: PriorityOrdering,
    path: str | os.PathLike,
    bits_per_axis: int = 31,
) -> None:
    """Write the KDCS file: header plus points in priority order.

    ordering.permutation must index ``pointset.points`` directly (compose a
    rank-space ordering with the Z-order sort permutation first, see
    ordering.apply_to_sorted).
    """
    if ordering.source_count != len(pointset):
        raise ValueError("ordering and point set sizes differ")
    header = _HEADER.pack(
        KDCS_MAGIC,
        KDCS_VERSION,
        _METHOD_TAGS[ordering.method],
        1 if ordering.mask is not None else 0,
        ordering.source_count,
        ordering.padded_count,
        bits_per_axis,
        0,
        ordering.seed,
        ordering.mask if ordering.mask is not None else 0,
    )
    body = np.ascontiguousarray(
        pointset.points[ordering.permutation], dtype="<f8"
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body.tobytes())


@dataclass(frozen=True)
class KdcsMeta:
    source_count: int
    padded_count: int
    bits_per_axis: int
    seed: int
    mask: int | None
    method: str


def load_priority_dataset(
    path: str | os.PathLike,
) -> tuple[PointSet, KdcsMeta]:
    """Read a KDCS file back as (points in priority order, metadata)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise KdcsFormatError("truncated header", len(raw))
    (
        magic,
        version,
        method_tag,
        flags,
        source_count,
        padded_count,
        bits_per_axis,
        _reserved,
        seed,
        mask,
    ) = _HEADER.unpack_from(raw, 0)
    if magic != KDCS_MAGIC:
        raise KdcsFormatError(f"bad magic {magic!r}", 0)
    if version != KDCS_VERSION:
        raise KdcsFormatError(f"unsupported format version {version}", 4)
    if method_tag not in _TAG_METHODS:
        raise KdcsFormatError(f"unknown method tag {method_tag}", 6)
    if source_count < 1:
        raise KdcsFormatError("file declares zero points", 8)
    expected = _HEADER.size + source_count * 16
    if len(raw) != expected:
        raise KdcsFormatError(
            f"point section has {len(raw) - _HEADER.size} bytes, "
            f"expected {source_count * 16}",
            min(len(raw), expected),
        )
    pts = (
        np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
        .reshape(source_count, 2)
        .copy()
    )
    meta = KdcsMeta(
        source_count=source_count,
        padded_count=padded_count,
        bits_per_axis=bits_per_axis,
        seed=seed,
        mask=mask if flags & 1 else None,
        method=_TAG_METHODS[method_tag],
    )
    return PointSet(points=pts), meta
