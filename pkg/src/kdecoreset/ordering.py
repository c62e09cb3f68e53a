"""Coreset construction over Z-order sorted data.

Two kinds of subsets are produced from a Z-order sorted dataset:

* direct rank-range selection (one random point per contiguous rank range),
  which yields one coreset of a fixed size, and
* *priority orderings*, permutations with the property that every length-k
  prefix is itself a size-k coreset.  ``bit_reverse_permute`` builds one by
  reversing the bits of each rank's binary label, XOR-ing a random mask and
  sorting; ``tree_priority_reorder`` draws selections from a perfectly
  balanced binary tree instead.  Both satisfy the same dyadic balance
  property: every aligned block of 2^j consecutive ranks is hit once per
  2^(m-j) selections, as evenly as possible.

Random-sampling baselines and the size formulas for both routes live here
too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

METHOD_BIT_REVERSAL = "bit_reversal"
METHOD_TREE = "tree"


@dataclass(frozen=True)
class CoresetSpec:
    """Error target and calibration constants for subset sizing.

    eps and delta are the accuracy / failure-probability pair; the c_*
    constants absorb the hidden factors of the asymptotic bounds and default
    to 1 until calibrated empirically.
    """

    eps: float
    delta: float
    c_coreset: float = 1.0
    c_rs: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must be in (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.c_coreset <= 0 or self.c_rs <= 0:
            raise ValueError("calibration constants must be positive")


@dataclass
class PriorityOrdering:
    """A permutation of Z-order ranks whose every prefix is a coreset.

    permutation[j] is the rank selected j-th.  padded_order additionally
    records the selection sequence over the padded power-of-two index space
    (dummy ranks >= source_count included); it is what the dyadic balance
    property is stated on and is kept for diagnostics and tests.
    """

    source_count: int
    padded_count: int
    permutation: np.ndarray
    seed: int
    mask: int | None
    method: str
    padded_order: np.ndarray = field(repr=False, default=None)

    def __post_init__(self) -> None:
        if self.permutation.shape != (self.source_count,):
            raise ValueError("permutation length must equal source_count")


def coreset_size_for_eps(spec: CoresetSpec) -> int:
    """Coreset size: ceil(c * (1/eps) * ln(1/eps)^2.5 * ln(1/delta)), min 1."""
    size = (
        spec.c_coreset
        * (1.0 / spec.eps)
        * math.log(1.0 / spec.eps) ** 2.5
        * math.log(1.0 / spec.delta)
    )
    return max(1, math.ceil(size))


def random_sample_size_for_eps(spec: CoresetSpec) -> int:
    """Random-sample size: ceil(c * (1/eps^2) * ln(1/delta)), min 1."""
    size = spec.c_rs * (1.0 / spec.eps**2) * math.log(1.0 / spec.delta)
    return max(1, math.ceil(size))


def _count_of(points_or_n) -> int:
    try:
        return int(points_or_n)
    except TypeError:
        return len(points_or_n)


def zorder_block_coreset(points_or_n, k: int, seed: int) -> np.ndarray:
    """One uniformly random rank from each of k contiguous rank ranges.

    The first argument is a Z-order sorted point array or its length; only
    the length matters.  Ranges are the half-open intervals
    [round((i-1)n/k), round(i*n/k)); they partition [0, n) for every k <= n.
    """
    n = _count_of(points_or_n)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    edges = block_edges(n, k)
    rng = np.random.default_rng(seed)
    return rng.integers(edges[:-1], edges[1:]).astype(np.int64)


def block_edges(n: int, k: int) -> np.ndarray:
    """Half-open range endpoints round(i*n/k) for i = 0..k, computed exactly."""
    i = np.arange(k + 1, dtype=np.int64)
    return (2 * i * n + k) // (2 * k)


def _bit_reverse(values: np.ndarray, bits: int) -> np.ndarray:
    """Reverse the low ``bits`` bits of each value."""
    values = values.astype(np.uint64)
    out = np.zeros_like(values)
    for _ in range(bits):
        out = (out << np.uint64(1)) | (values & np.uint64(1))
        values = values >> np.uint64(1)
    return out


def padded_size(n: int) -> tuple[int, int]:
    """(m, N) with N = 2^m the smallest power of two >= n."""
    m = max(0, (n - 1).bit_length())
    return m, 1 << m


def bit_reverse_permute(
    n: int, mask: int | None = None, seed: int = 0
) -> PriorityOrdering:
    """Priority ordering via bit reversal of rank labels plus a random mask.

    Ranks 0..n-1 are padded with dummies up to N = 2^m, labelled by their
    m-bit binary index, bit-reversed, XOR-ed with the m-bit mask, and sorted
    by the resulting number; dummies are stripped from the sorted sequence.
    Deterministic given (n, mask); the mask is drawn from ``seed`` when not
    supplied.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m, big_n = padded_size(n)
    if mask is None:
        rng = np.random.default_rng(seed)
        mask = int(rng.integers(0, big_n)) if m > 0 else 0
    if not 0 <= mask < big_n:
        raise ValueError(f"mask must have at most {m} bits")
    labels = np.arange(big_n, dtype=np.uint64)
    keys = _bit_reverse(labels, m) ^ np.uint64(mask)
    padded_order = np.argsort(keys, kind="stable").astype(np.int64)
    permutation = padded_order[padded_order < n]
    return PriorityOrdering(
        source_count=n,
        padded_count=big_n,
        permutation=permutation,
        seed=seed,
        mask=mask,
        method=METHOD_BIT_REVERSAL,
        padded_order=padded_order,
    )


class _BitStream:
    """Buffered stream of fair random bits from a seeded generator."""

    def __init__(self, seed: int, chunk: int = 1 << 14) -> None:
        self._rng = np.random.default_rng(seed)
        self._chunk = chunk
        self._buf = np.empty(0, dtype=np.uint8)
        self._pos = 0

    def next(self) -> int:
        if self._pos >= self._buf.size:
            self._buf = self._rng.integers(
                0, 2, size=self._chunk, dtype=np.uint8
            )
            self._pos = 0
        bit = self._buf[self._pos]
        self._pos += 1
        return int(bit)


def tree_priority_reorder(n: int, seed: int = 0) -> PriorityOrdering:
    """Priority ordering by balanced random descent of a perfect binary tree.

    The tree spans the padded rank space, dummies rightmost.  Each selection
    walks from the root: where neither child is marked it branches on a fair
    coin and marks the chosen child, otherwise it unmarks the marked child
    and takes the other.  A mark therefore means "this subtree is one
    selection ahead of its sibling", which keeps every subtree's selection
    count as balanced as possible.  The first N selections visit each leaf
    exactly once; dummy leaves consume a selection but are not emitted, so
    they shield the underfull right subtree from over-selection.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m, big_n = padded_size(n)
    bits = _BitStream(seed)
    # Heap layout: root at 1, children of i at 2i and 2i+1, leaf r at N + r.
    marked = np.zeros(2 * big_n, dtype=bool)
    permutation = np.empty(n, dtype=np.int64)
    padded: list[int] = []
    emitted = 0
    while emitted < n:
        node = 1
        while node < big_n:
            left = 2 * node
            right = left + 1
            if not marked[left] and not marked[right]:
                node = left + bits.next()
                marked[node] = True
            elif marked[left]:
                marked[left] = False
                node = right
            else:
                marked[right] = False
                node = left
        rank = node - big_n
        padded.append(rank)
        if rank < n:
            permutation[emitted] = rank
            emitted += 1
    return PriorityOrdering(
        source_count=n,
        padded_count=big_n,
        permutation=permutation,
        seed=seed,
        mask=None,
        method=METHOD_TREE,
        padded_order=np.asarray(padded, dtype=np.int64),
    )


def extract_coreset(ordering: PriorityOrdering, k: int) -> np.ndarray:
    """First k entries of the priority permutation; prefixes are nested."""
    if not 1 <= k <= ordering.source_count:
        raise ValueError(
            f"k must be in [1, {ordering.source_count}], got {k}"
        )
    return ordering.permutation[:k].copy()


def priority_index_per_rank(ordering: PriorityOrdering) -> np.ndarray:
    """1-based selection position of each rank (inverse permutation + 1)."""
    inv = np.empty(ordering.source_count, dtype=np.int64)
    inv[ordering.permutation] = np.arange(1, ordering.source_count + 1)
    return inv


def apply_to_sorted(
    ordering: PriorityOrdering, sort_perm: np.ndarray
) -> PriorityOrdering:
    """Re-express a rank-space ordering in the original point index space.

    sort_perm[rank] is the original index of the point at that Z-order rank.
    """
    sort_perm = np.asarray(sort_perm, dtype=np.int64)
    if sort_perm.shape != (ordering.source_count,):
        raise ValueError("sort permutation length mismatch")
    return PriorityOrdering(
        source_count=ordering.source_count,
        padded_count=ordering.padded_count,
        permutation=sort_perm[ordering.permutation],
        seed=ordering.seed,
        mask=ordering.mask,
        method=ordering.method,
        padded_order=ordering.padded_order,
    )


def random_sample(points_or_n, k: int, seed: int) -> np.ndarray:
    """Uniform sample of k distinct indices, deterministic given seed."""
    n = _count_of(points_or_n)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    return rng.choice(n, size=k, replace=False).astype(np.int64)
