"""Tests for hsurf.verification.scans."""

import numpy as np
import pytest

from hsurf.algebra.parser import parse_forms
from hsurf.algebra.rational import INFINITY
from hsurf.config import DEFAULT_CONFIG
from hsurf.surfaces.domains import Domain
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData
from hsurf.verification.mesh import Region, TriMesh
from hsurf.verification.scans import (
    chordal_distance,
    injectivity_witness_search,
    parameter_distance,
    regularity_scan,
    self_intersection_scan,
)
from hsurf.verification.witnesses import WitnessKind

REGION = Region(0.05, 2.0)

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _make_surface(text: str) -> SurfaceData:
    forms = [MeromorphicForm.from_wexpr(e) for e in parse_forms(text)]
    return SurfaceData(Domain.sphere([INFINITY]), forms, label=text)


def _make_soup(offset=(0.0, 0.0, 0.0)) -> TriMesh:
    flat = [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    piercing = np.array([[0.2, 0.2, -1], [0.3, 0.2, 1], [0.2, 0.3, 1]]) + offset
    vertices = np.concatenate([flat, piercing]).astype(float)
    return TriMesh(vertices, np.array([[0, 1, 2], [3, 4, 5]]), np.arange(6) + 0j, np.zeros(6, dtype=int))


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


class TestDistances:
    def test_chordal(self):
        assert chordal_distance(0, 1) == pytest.approx(np.sqrt(2))
        assert chordal_distance(2j, -0.5) == pytest.approx(chordal_distance(-0.5, 2j))
        assert chordal_distance(1e9, -1e9) <= 2

    def test_parameter_distance_on_sphere(self):
        s = _make_surface("1, i, z")
        assert parameter_distance(s, 0.5, 0, 1j, 0) == pytest.approx(chordal_distance(0.5, 1j))


# ---------------------------------------------------------------------------
# Regularity
# ---------------------------------------------------------------------------


class TestRegularityScan:
    def test_finds_isolated_singular_point(self):
        # f = ((x² - y²)/2, -xy, x) has f_y = 0 at the origin
        witnesses = regularity_scan(_make_surface("z, i*z, 1"), REGION, grid=16)
        assert len(witnesses) == 1
        (w,) = witnesses
        assert w.kind is WitnessKind.SINGULAR_POINT
        assert abs(w.points[0].z) < 1e-6

    def test_regular_surface(self):
        assert regularity_scan(_make_surface("1, i, z"), REGION, grid=16) == []


# ---------------------------------------------------------------------------
# Self-intersections and injectivity
# ---------------------------------------------------------------------------


class TestSelfIntersectionScan:
    def test_mesh_only(self):
        witnesses = self_intersection_scan(_make_soup())
        assert len(witnesses) == 1
        assert witnesses[0].kind is WitnessKind.SELF_INTERSECTION
        assert len(witnesses[0].points) == 2

    def test_disjoint(self):
        assert self_intersection_scan(_make_soup((3.0, 0.0, 0.0))) == []


@pytest.mark.slow
class TestInjectivitySearch:
    def test_finds_double_curve(self):
        # f = (x² - y², -2xy, -y) identifies z and -z on the real axis
        s = _make_surface("2*z, 2*i*z, i")
        witnesses = injectivity_witness_search(s, REGION, config=DEFAULT_CONFIG.replace(mesh_density=16))
        assert witnesses
        for w in witnesses:
            p, q = w.points
            assert abs(p.z + q.z) < 1e-6
            assert abs(p.z.imag) < 1e-6
            assert w.residual(s) < 1e-8

    def test_graph_is_injective(self):
        s = _make_surface("1, i, z")
        assert injectivity_witness_search(s, REGION, config=DEFAULT_CONFIG.replace(mesh_density=16)) == []
