"""Tests for hsurf.verification.bvh."""

import numpy as np

from hsurf.verification.bvh import build_bvh, candidate_pairs, intersecting_pairs, triangles_intersect

FLAT = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
PIERCING = np.array([[0.2, 0.2, -1], [0.3, 0.2, 1], [0.2, 0.3, 1]], dtype=float)


class TestTrianglesIntersect:
    def test_piercing(self):
        assert triangles_intersect(FLAT[None], PIERCING[None], 1e-12).tolist() == [True]

    def test_separated(self):
        lifted = PIERCING + [0, 0, 5]
        assert triangles_intersect(FLAT[None], lifted[None], 1e-12).tolist() == [False]

    def test_coplanar_is_not_reported(self):
        shifted = FLAT + [0.1, 0.1, 0]
        assert triangles_intersect(FLAT[None], shifted[None], 1e-12).tolist() == [False]

    def test_vectorised(self):
        t1 = np.stack([FLAT, FLAT])
        t2 = np.stack([PIERCING, PIERCING + [3, 0, 0]])
        assert triangles_intersect(t1, t2, 1e-12).tolist() == [True, False]


class TestBVH:
    def _make_soup(self, n=40, seed=0):
        rng = np.random.default_rng(seed)
        centers = rng.uniform(-5, 5, (n, 3))
        return centers[:, None, :] + rng.uniform(-0.2, 0.2, (n, 3, 3))

    def test_tree_covers_all_triangles(self):
        tris = self._make_soup()
        bvh = build_bvh(tris.min(axis=1), tris.max(axis=1), leaf_size=4)
        leaves = [bvh.items[k] for k in range(bvh.n_nodes) if bvh.is_leaf(k)]
        assert sorted(np.concatenate(leaves).tolist()) == list(range(len(tris)))
        assert all(len(ids) <= 4 for ids in leaves)
        assert np.all(bvh.lo[0] <= tris.min(axis=(0, 1)))

    def test_candidates_include_overlaps(self):
        tris = self._make_soup()
        tris[7] = tris[3] + 0.01
        bvh = build_bvh(tris.min(axis=1), tris.max(axis=1), leaf_size=4)
        pairs = candidate_pairs(bvh)
        assert [3, 7] in pairs.tolist()
        assert np.all(pairs[:, 0] < pairs[:, 1])

    def test_intersecting_pairs(self):
        vertices = np.concatenate([FLAT, PIERCING, PIERCING + [3, 0, 0]])
        triangles = np.array([[0, 1, 2], [3, 4, 5], [6, 7, 8]])
        assert intersecting_pairs(vertices, triangles).tolist() == [[0, 1]]

    def test_shared_vertex_pairs_skipped(self):
        vertices = np.concatenate([FLAT, [[0.5, 0.5, 1], [0.5, 0.5, -1]]])
        triangles = np.array([[0, 1, 2], [0, 3, 4]])
        assert len(intersecting_pairs(vertices, triangles)) == 0
