"""Bounding-volume hierarchy over triangles.

Built in numpy with binned surface-area-heuristic splits, consumed by
the numba traversal kernels. Both renderers share this one geometry
kernel so visibility is resolved identically everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEAF_SIZE = 8
SAH_BINS = 16


@dataclass(frozen=True)
class Bvh:
    """Flat node arrays. Leaf: count > 0, left = first triangle (after
    reordering), right unused. Inner: count == 0, left/right = children."""

    node_lo: np.ndarray   # (n,3) float64
    node_hi: np.ndarray   # (n,3) float64
    node_left: np.ndarray   # (n,) int32
    node_right: np.ndarray  # (n,) int32
    node_count: np.ndarray  # (n,) int32
    order: np.ndarray       # (ntri,) int32 triangle permutation


def _surface_area(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    d = np.maximum(hi - lo, 0.0)
    return d[..., 0] * d[..., 1] + d[..., 1] * d[..., 2] + d[..., 2] * d[..., 0]


def _sah_split(idx, bins, tri_lo, tri_hi, n):
    """Cheapest bin boundary by the surface area heuristic.

    Returns (mid, part): number of triangles in the left child and the
    permutation of range(n) placing them first. Falls back to an even
    split when every triangle lands in one bin.
    """
    bin_lo = np.full((SAH_BINS, 3), np.inf)
    bin_hi = np.full((SAH_BINS, 3), -np.inf)
    counts = np.bincount(bins, minlength=SAH_BINS)
    for b in np.nonzero(counts)[0]:
        sel = idx[bins == b]
        bin_lo[b] = tri_lo[sel].min(axis=0)
        bin_hi[b] = tri_hi[sel].max(axis=0)
    # prefix/suffix sweeps of bounds and counts over the bin boundaries
    left_lo = np.minimum.accumulate(bin_lo, axis=0)
    left_hi = np.maximum.accumulate(bin_hi, axis=0)
    right_lo = np.minimum.accumulate(bin_lo[::-1], axis=0)[::-1]
    right_hi = np.maximum.accumulate(bin_hi[::-1], axis=0)[::-1]
    left_n = np.cumsum(counts)
    right_n = n - left_n
    cost = np.full(SAH_BINS - 1, np.inf)
    for b in range(SAH_BINS - 1):
        if left_n[b] == 0 or right_n[b] == 0:
            continue
        cost[b] = (left_n[b] * _surface_area(left_lo[b], left_hi[b])
                   + right_n[b] * _surface_area(right_lo[b + 1], right_hi[b + 1]))
    if not np.isfinite(cost).any():
        mid = n // 2
        return mid, np.argsort(bins, kind="stable")
    split = int(np.argmin(cost))
    part = np.argsort(bins > split, kind="stable")
    return int(left_n[split]), part


def build_bvh(v0: np.ndarray, v1: np.ndarray, v2: np.ndarray) -> Bvh:
    ntri = len(v0)
    if ntri == 0:
        return Bvh(np.zeros((0, 3)), np.zeros((0, 3)),
                   np.zeros(0, np.int32), np.zeros(0, np.int32),
                   np.zeros(0, np.int32), np.zeros(0, np.int32))
    tri_lo = np.minimum(np.minimum(v0, v1), v2)
    tri_hi = np.maximum(np.maximum(v0, v1), v2)
    centroids = (tri_lo + tri_hi) * 0.5

    lo_list, hi_list = [], []
    left_list, right_list, count_list = [], [], []
    order = np.arange(ntri, dtype=np.int32)

    # stack of (start, end, node_index); nodes appended breadth-last
    def new_node():
        lo_list.append(None)
        hi_list.append(None)
        left_list.append(0)
        right_list.append(0)
        count_list.append(0)
        return len(lo_list) - 1

    root = new_node()
    stack = [(0, ntri, root)]
    while stack:
        start, end, node = stack.pop()
        idx = order[start:end]
        lo = tri_lo[idx].min(axis=0)
        hi = tri_hi[idx].max(axis=0)
        lo_list[node] = lo
        hi_list[node] = hi
        n = end - start
        if n <= LEAF_SIZE:
            left_list[node] = start
            right_list[node] = -1
            count_list[node] = n
            continue
        c = centroids[idx]
        c_lo = c.min(axis=0)
        c_extent = c.max(axis=0) - c_lo
        axis = int(np.argmax(c_extent))
        if c_extent[axis] < 1e-12:
            mid = n // 2  # all centroids coincide; split arbitrarily
            part = np.argsort(c[:, axis], kind="stable")
        else:
            # binned surface area heuristic along the widest axis
            bins = np.minimum(
                (SAH_BINS * (c[:, axis] - c_lo[axis]) / c_extent[axis]).astype(np.int64),
                SAH_BINS - 1)
            mid, part = _sah_split(idx, bins, tri_lo, tri_hi, n)
        order[start:end] = idx[part]
        left = new_node()
        right = new_node()
        left_list[node] = left
        right_list[node] = right
        count_list[node] = 0
        stack.append((start, start + mid, left))
        stack.append((start + mid, end, right))

    return Bvh(
        node_lo=np.asarray(lo_list, dtype=np.float64),
        node_hi=np.asarray(hi_list, dtype=np.float64),
        node_left=np.asarray(left_list, dtype=np.int32),
        node_right=np.asarray(right_list, dtype=np.int32),
        node_count=np.asarray(count_list, dtype=np.int32),
        order=order,
    )
