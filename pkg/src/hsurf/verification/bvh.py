"""Axis-aligned bounding-box tree and triangle–triangle intersection.

The tree splits at the median centroid along the longest box axis. Candidate
pairs come from a simultaneous descent of the tree against itself; the exact
test is the interval-overlap triangle predicate, vectorised over candidates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from hsurf.tolerances import BVH_LEAF_SIZE

logger = logging.getLogger(__name__)


@dataclass
class BVH:
    lo: np.ndarray  # (k, 3) node boxes
    hi: np.ndarray
    left: np.ndarray  # child indices, -1 at leaves
    right: np.ndarray
    items: list[np.ndarray]  # triangle ids per node (leaves only)

    @property
    def n_nodes(self) -> int:
        return len(self.left)

    def is_leaf(self, k: int) -> bool:
        return self.left[k] < 0


def build_bvh(tri_lo: np.ndarray, tri_hi: np.ndarray, leaf_size: int = BVH_LEAF_SIZE) -> BVH:
    """Build a tree over boxes ``[tri_lo[i], tri_hi[i]]``."""
    centroids = 0.5 * (tri_lo + tri_hi)
    lo, hi, left, right, items = [], [], [], [], []

    def node(ids: np.ndarray) -> int:
        k = len(left)
        lo.append(tri_lo[ids].min(axis=0))
        hi.append(tri_hi[ids].max(axis=0))
        left.append(-1)
        right.append(-1)
        items.append(ids)
        return k

    root = node(np.arange(len(tri_lo)))
    stack = [root]
    while stack:
        k = stack.pop()
        ids = items[k]
        if len(ids) <= leaf_size:
            continue
        axis = int(np.argmax(hi[k] - lo[k]))
        order = ids[np.argsort(centroids[ids, axis], kind="stable")]
        half = len(order) // 2
        a, b = node(order[:half]), node(order[half:])
        left[k], right[k] = a, b
        items[k] = np.empty(0, dtype=int)
        stack += [a, b]
    return BVH(np.array(lo), np.array(hi), np.array(left), np.array(right), items)


def _overlap(bvh: BVH, a: int, b: int, pad: float) -> bool:
    return bool(np.all(bvh.lo[a] <= bvh.hi[b] + pad) and np.all(bvh.lo[b] <= bvh.hi[a] + pad))


def candidate_pairs(bvh: BVH, pad: float = 0.0) -> np.ndarray:
    """Triangle pairs ``(i, j)``, ``i < j``, whose boxes overlap."""
    out = []
    stack = [(0, 0)]
    while stack:
        a, b = stack.pop()
        if not _overlap(bvh, a, b, pad):
            continue
        leaf_a, leaf_b = bvh.is_leaf(a), bvh.is_leaf(b)
        if leaf_a and leaf_b:
            ia, ib = bvh.items[a], bvh.items[b]
            if a == b:
                i, j = np.triu_indices(len(ia), k=1)
                out.append(np.column_stack([ia[i], ia[j]]))
            else:
                i, j = np.meshgrid(ia, ib, indexing="ij")
                out.append(np.column_stack([i.ravel(), j.ravel()]))
        elif a == b:
            lc, rc = bvh.left[a], bvh.right[a]
            stack += [(lc, lc), (rc, rc), (lc, rc)]
        elif leaf_b or (not leaf_a and np.sum(bvh.hi[a] - bvh.lo[a]) >= np.sum(bvh.hi[b] - bvh.lo[b])):
            stack += [(bvh.left[a], b), (bvh.right[a], b)]
        else:
            stack += [(a, bvh.left[b]), (a, bvh.right[b])]
    if not out:
        return np.empty((0, 2), dtype=int)
    pairs = np.concatenate(out)
    pairs.sort(axis=1)
    return np.unique(pairs, axis=0)


# ---------------------------------------------------------------------------
# Exact test
# ---------------------------------------------------------------------------


def _plane_distances(p0, normal, pts, eps):
    d = np.einsum("nij,nj->ni", pts - p0[:, None, :], normal)
    return np.where(np.abs(d) < eps, 0.0, d)


def _interval(proj: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interval where a triangle meets the other's plane, along the shared line."""
    d0, d1, d2 = d[:, 0], d[:, 1], d[:, 2]
    lonely = np.select(
        [d0 * d1 > 0, d0 * d2 > 0, (d1 * d2 > 0) | (d0 != 0), d1 != 0],
        [2, 1, 0, 1],
        default=2,
    )
    rows = np.arange(len(d))
    others = np.array([[1, 2], [0, 2], [0, 1]])[lonely]
    pk, dk = proj[rows, lonely], d[rows, lonely]
    ends = []
    for col in range(2):
        a = others[:, col]
        pa, da = proj[rows, a], d[rows, a]
        denom = np.where(da - dk == 0, 1.0, da - dk)
        ends.append(pa + (pk - pa) * da / denom)
    return np.minimum(*ends), np.maximum(*ends)


def triangles_intersect(t1: np.ndarray, t2: np.ndarray, eps: float) -> np.ndarray:
    """Vectorised intersection test for triangle pairs of shape ``(n, 3, 3)``.

    Pairs that only touch (overlap shorter than ``eps``) and coplanar pairs
    report False.
    """
    n1 = np.cross(t1[:, 1] - t1[:, 0], t1[:, 2] - t1[:, 0])
    n2 = np.cross(t2[:, 1] - t2[:, 0], t2[:, 2] - t2[:, 0])
    n1 /= np.maximum(np.linalg.norm(n1, axis=1, keepdims=True), 1e-300)
    n2 /= np.maximum(np.linalg.norm(n2, axis=1, keepdims=True), 1e-300)

    dv = _plane_distances(t2[:, 0], n2, t1, eps)
    du = _plane_distances(t1[:, 0], n1, t2, eps)
    separated = np.all(dv > 0, axis=1) | np.all(dv < 0, axis=1) | np.all(du > 0, axis=1) | np.all(du < 0, axis=1)
    coplanar = np.all(dv == 0, axis=1) | np.all(du == 0, axis=1)

    line = np.cross(n1, n2)
    axis = np.argmax(np.abs(line), axis=1)
    rows = np.arange(len(t1))
    p1 = t1[rows, :, axis]
    p2 = t2[rows, :, axis]
    lo1, hi1 = _interval(p1, dv)
    lo2, hi2 = _interval(p2, du)
    overlap = np.minimum(hi1, hi2) - np.maximum(lo1, lo2)
    return ~separated & ~coplanar & (overlap > eps)


def intersecting_pairs(
    vertices: np.ndarray, triangles: np.ndarray, leaf_size: int = BVH_LEAF_SIZE, eps: float = 0.0
) -> np.ndarray:
    """Pairs of triangles sharing no vertex whose images intersect."""
    corners = vertices[triangles]
    bvh = build_bvh(corners.min(axis=1), corners.max(axis=1), leaf_size)
    pairs = candidate_pairs(bvh, pad=eps)
    if len(pairs) == 0:
        return pairs
    shared = np.zeros(len(pairs), dtype=bool)
    ta, tb = triangles[pairs[:, 0]], triangles[pairs[:, 1]]
    for i in range(3):
        for j in range(3):
            shared |= ta[:, i] == tb[:, j]
    pairs = pairs[~shared]
    logger.debug(f"{bvh.n_nodes} BVH nodes, {len(pairs)} candidate pairs")
    if len(pairs) == 0:
        return pairs
    hit = triangles_intersect(corners[pairs[:, 0]], corners[pairs[:, 1]], eps)
    return pairs[hit]


__all__ = [
    "BVH",
    "build_bvh",
    "candidate_pairs",
    "intersecting_pairs",
    "triangles_intersect",
]
