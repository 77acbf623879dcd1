"""Tests for hsurf.verification.mesh and hsurf.verification.obj."""

import numpy as np
import pytest

from hsurf.algebra.parser import parse_forms
from hsurf.algebra.rational import INFINITY
from hsurf.evaluation.evaluate import evaluate_many
from hsurf.surfaces.domains import Domain
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData
from hsurf.verification.mesh import Region, TriMesh, build_mesh
from hsurf.verification.obj import read_obj, write_obj

CATENOID = "(1/z^2 - 1)/2, i*(1/z^2 + 1)/2, 1/z"

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _make_surface(text: str, punctures=(INFINITY,)) -> SurfaceData:
    forms = [MeromorphicForm.from_wexpr(e) for e in parse_forms(text)]
    return SurfaceData(Domain.sphere(list(punctures)), forms, label="test")


def _make_square() -> TriMesh:
    vertices = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
    triangles = np.array([[0, 1, 2], [0, 2, 3]])
    z = np.array([0, 1, 1 + 1j, 1j])
    return TriMesh(vertices, triangles, z, np.zeros(4, dtype=int))


# ---------------------------------------------------------------------------
# Region
# ---------------------------------------------------------------------------


class TestRegion:
    def test_parse(self):
        assert Region.parse("0.1, 5") == Region(0.1, 5.0)

    def test_parse_needs_two_values(self):
        with pytest.raises(ValueError, match="r_min,r_max"):
            Region.parse("0.1")

    def test_ordering(self):
        with pytest.raises(ValueError, match="r_min < r_max"):
            Region(1.0, 0.5)


# ---------------------------------------------------------------------------
# TriMesh
# ---------------------------------------------------------------------------


class TestTriMesh:
    def test_topology(self):
        m = _make_square()
        assert len(m.edges()) == 5
        assert len(m.boundary_edges()) == 4
        assert m.boundary_loops() == 1
        assert m.euler_characteristic() == 1

    def test_normals(self):
        m = _make_square()
        normals = m.compute_normals()
        assert normals == pytest.approx(np.tile([0, 0, 1], (4, 1)))

    def test_bbox(self):
        assert _make_square().bbox_diag == pytest.approx(np.sqrt(2))

    def test_drop_degenerate(self):
        m = _make_square()
        m.vertices[3] = [0.5, 0.5, 0]  # collapses the second triangle
        out = m.drop_degenerate()
        assert out.n_triangles == 1
        assert out.n_vertices == 3

    def test_source(self):
        p = _make_square().source(2)
        assert p.z == 1 + 1j
        assert p.sheet == 0


# ---------------------------------------------------------------------------
# build_mesh
# ---------------------------------------------------------------------------


class TestBuildMesh:
    def test_vertices_are_surface_points(self):
        s = _make_surface("1, i, z")
        m = build_mesh(s, Region(0.05, 3.0), density=12)
        assert m.vertices == pytest.approx(evaluate_many(s, m.z))
        assert m.normals is not None
        assert m.euler_characteristic() == 1

    def test_catenoid_is_an_annulus(self):
        s = _make_surface(CATENOID, (0, INFINITY))
        m = build_mesh(s, Region(0.2, 4.0), density=16, with_normals=False)
        assert m.normals is None
        assert m.boundary_loops() == 2
        assert np.abs(m.z).min() >= 0.2 - 1e-12


# ---------------------------------------------------------------------------
# OBJ
# ---------------------------------------------------------------------------


class TestObj:
    def test_write_read(self, tmp_path):
        m = _make_square()
        m.compute_normals()
        path = write_obj(m, tmp_path / "sub" / "square.obj", comment="square\ntwo triangles")
        text = path.read_text()
        assert text.startswith("# square\n# two triangles\n")
        assert "f 1//1 2//2 3//3" in text

        back = read_obj(path)
        assert back.vertices == pytest.approx(m.vertices)
        assert back.triangles.tolist() == m.triangles.tolist()
        assert back.normals == pytest.approx(m.normals)
        assert np.isnan(back.z).all()

    def test_without_normals(self, tmp_path):
        path = write_obj(_make_square(), tmp_path / "square.obj", normals=True)
        text = path.read_text()
        assert "vn" not in text
        assert "f 1 2 3" in text
        assert read_obj(path).normals is None

    def test_rejects_quads(self, tmp_path):
        path = tmp_path / "quad.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
        with pytest.raises(ValueError, match="triangular"):
            read_obj(path)
