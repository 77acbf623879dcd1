"""Tests for hsurf.verification.symmetry."""

import numpy as np
import pytest

from hsurf.algebra.parser import parse_forms
from hsurf.algebra.rational import INFINITY
from hsurf.surfaces.domains import Domain, SheetPoint
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData
from hsurf.verification.symmetry import SymmetryDescriptor, check_symmetry, symmetry_samples

REFLECT_Y = np.diag([1.0, -1.0, 1.0])
QUARTER_TURN = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])


def _make_saddle() -> SurfaceData:
    forms = [MeromorphicForm.from_wexpr(e) for e in parse_forms("1, i, z")]
    return SurfaceData(Domain.sphere([INFINITY]), forms, label="saddle")


class TestSymmetryDescriptor:
    @pytest.mark.parametrize(
        "domain_map, matrix, match",
        [
            ("flip", np.eye(3), "Unknown domain map"),
            ("rotation:1", np.eye(3), "order k"),
            ("rotation", np.eye(3), "order k"),
            ("conj", 2 * np.eye(3), "orthogonal"),
        ],
    )
    def test_validation(self, domain_map, matrix, match):
        with pytest.raises(ValueError, match=match):
            SymmetryDescriptor(domain_map, matrix)

    def test_dict_round_trip(self):
        desc = SymmetryDescriptor("rotation:4", QUARTER_TURN, name="quarter")
        back = SymmetryDescriptor.from_dict(desc.to_dict())
        assert back.domain_map == "rotation:4"
        assert back.matrix == pytest.approx(QUARTER_TURN)
        assert back.translation is None
        assert back.name == "quarter"

    def test_apply(self):
        s = _make_saddle()
        assert SymmetryDescriptor("conj").apply(s, SheetPoint(1 + 2j)) == SheetPoint(1 - 2j)
        assert SymmetryDescriptor("inv_conj").apply(s, SheetPoint(2j)).z == pytest.approx(0.5j)
        assert SymmetryDescriptor("rotation:4").apply(s, SheetPoint(1 + 0j)).z == pytest.approx(1j)


class TestCheckSymmetry:
    def test_reflection(self):
        result = check_symmetry(_make_saddle(), SymmetryDescriptor("conj", REFLECT_Y))
        assert result.passed
        assert result.translation == pytest.approx([0, 0, 0], abs=1e-9)
        assert "pass" in str(result)

    def test_rotation(self):
        result = check_symmetry(_make_saddle(), SymmetryDescriptor("rotation:4", QUARTER_TURN))
        assert result.passed

    def test_wrong_matrix_fails(self):
        result = check_symmetry(_make_saddle(), SymmetryDescriptor("conj"))
        assert not result.passed
        assert "FAIL" in str(result)

    def test_explicit_samples(self):
        samples = [SheetPoint(0.5 + 0.5j), SheetPoint(-1 + 2j)]
        result = check_symmetry(_make_saddle(), SymmetryDescriptor("conj", REFLECT_Y), samples)
        assert result.n_samples == 2

    def test_samples_avoid_real_axis(self):
        pts = symmetry_samples(_make_saddle(), 20, seed=3)
        assert len(pts) == 20
        assert all(abs(p.z.imag) >= 1e-3 and 0.3 <= abs(p.z) <= 3 for p in pts)
        assert pts == symmetry_samples(_make_saddle(), 20, seed=3)
