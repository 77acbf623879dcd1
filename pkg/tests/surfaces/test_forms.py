"""Tests for hsurf.surfaces.forms."""

import numpy as np
import pytest

from hsurf.algebra.parser import parse_forms
from hsurf.algebra.polynomials import CPoly
from hsurf.algebra.rational import INFINITY, CRational
from hsurf.config import NumericsConfig
from hsurf.surfaces.domains import Domain, SheetPoint
from hsurf.surfaces.forms import (
    MeromorphicForm,
    SurfaceData,
    combine,
    form_pole_order,
    form_residue,
    local_expansion,
    residues_real_check,
)

CUBIC = CPoly([0, -1, 0, 1])

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _forms(text: str, poly=None) -> list[MeromorphicForm]:
    return [MeromorphicForm.from_wexpr(e) for e in parse_forms(text, poly)]


def _make_sphere_surface(text: str = "1, i, 1/z", punctures=(0, INFINITY)) -> SurfaceData:
    return SurfaceData(Domain.sphere(list(punctures)), _forms(text), label="test")


def _make_curve() -> Domain:
    return Domain.hyperelliptic(CUBIC, [INFINITY], normalization=(2, 6**0.5))


# ---------------------------------------------------------------------------
# MeromorphicForm
# ---------------------------------------------------------------------------


class TestMeromorphicForm:
    def test_evaluate_sphere_form(self):
        (f,) = _forms("z^2 + 1")
        assert f(2) == pytest.approx(5)
        assert not f.has_w

    def test_evaluate_curve_form(self):
        (f,) = _forms("1 + z/w", CUBIC)
        assert f(2, 4) == pytest.approx(1.5)

    def test_curve_form_needs_w(self):
        (f,) = _forms("1/w", CUBIC)
        with pytest.raises(ValueError, match="w is required"):
            f(2)

    def test_deriv_curve_form(self):
        (f,) = _forms("1/w", CUBIC)
        z, h = 0.4 + 1.1j, 1e-6
        d = _make_curve()
        numeric = (f(z + h, d.w_plus(z + h)) - f(z - h, d.w_plus(z - h))) / (2 * h)
        assert f.deriv(z, d.w_plus(z), CUBIC) == pytest.approx(numeric, rel=1e-6)

    def test_linear_combination(self):
        f, g = _forms("z, 1/z")
        h = combine([f, g], [2, -1])
        assert h(2) == pytest.approx(3.5)
        assert (f - f).is_zero
        assert (3 * g)(1) == pytest.approx(3)


# ---------------------------------------------------------------------------
# SurfaceData
# ---------------------------------------------------------------------------


class TestSurfaceData:
    def test_three_forms_required(self):
        with pytest.raises(ValueError, match="three forms"):
            SurfaceData(Domain.sphere([INFINITY]), _forms("1, i"))

    def test_sphere_rejects_w(self):
        bad = [MeromorphicForm(CRational.zero(), CRational.constant(1))] * 3
        with pytest.raises(ValueError, match="dz/w"):
            SurfaceData(Domain.sphere([INFINITY]), bad)

    def test_phi_stacks_forms(self):
        s = _make_sphere_surface()
        np.testing.assert_allclose(s.phi(2.0), [1, 1j, 0.5])
        np.testing.assert_allclose(s.dphi(2.0), [0, 0, -0.25])
        assert s.phi(np.array([1.0, 2.0])).shape == (2, 3)

    def test_genus_and_punctures(self):
        s = _make_sphere_surface()
        assert s.genus == 0
        assert len(s.punctures) == 2
        assert "test" in repr(s)

    def test_antiderivatives(self):
        s = _make_sphere_surface()
        F3 = s.antiderivatives[2]
        assert F3.real_part(np.e) == pytest.approx(1)


# ---------------------------------------------------------------------------
# Local expansions
# ---------------------------------------------------------------------------


class TestLocalExpansion:
    @pytest.mark.parametrize(
        "text, point, order",
        [
            ("1", INFINITY, 2),
            ("z", INFINITY, 3),
            ("1/z", INFINITY, 1),
            ("1/z^2", INFINITY, 0),
            ("1/z^2", 0, 2),
        ],
    )
    def test_sphere_orders(self, text, point, order):
        (f,) = _forms(text)
        assert form_pole_order(f, Domain.sphere(), SheetPoint(point)) == order

    @pytest.mark.parametrize(
        "text, point, order",
        [
            ("1/w", INFINITY, 0),
            ("1", INFINITY, 3),
            ("z/w", INFINITY, 2),
            ("1/w", 0, 0),
            ("1", 0, 0),
            ("1/z", 0, 1),
            ("1/(z - 2)", SheetPoint(2, 1), 1),
        ],
    )
    def test_curve_orders(self, text, point, order):
        (f,) = _forms(text, CUBIC)
        p = point if isinstance(point, SheetPoint) else SheetPoint(point)
        assert form_pole_order(f, _make_curve(), p) == order

    def test_residues_on_sphere(self):
        (f,) = _forms("1/z")
        d = Domain.sphere()
        assert form_residue(f, d, SheetPoint(0)) == pytest.approx(1)
        assert form_residue(f, d, SheetPoint(INFINITY)) == pytest.approx(-1)
        assert form_residue(f, d, SheetPoint(1)) == 0

    def test_residue_at_branch_point(self):
        # z = t², dz/z = 2 dt/t
        (f,) = _forms("1/z", CUBIC)
        assert form_residue(f, _make_curve(), SheetPoint(0)) == pytest.approx(2)

    def test_regular_curve_point_expansion(self):
        (f,) = _forms("1/w", CUBIC)
        d = _make_curve()
        e = local_expansion(f, d, SheetPoint(2, 1), n_terms=3)
        assert e.min_degree == 0
        assert e.coeff(0) == pytest.approx(1 / 6**0.5)

    def test_zero_form(self):
        zero = MeromorphicForm(CRational.zero())
        assert form_pole_order(zero, Domain.sphere(), SheetPoint(0)) == 0


class TestResiduesRealCheck:
    def test_flags_imaginary_residues(self):
        s = _make_sphere_surface("1/z, i/z, 1", punctures=(0, INFINITY))
        df = residues_real_check(s)
        assert list(df.columns) == ["puncture", "form", "re", "im", "flagged"]
        assert len(df) == 6
        assert df["flagged"].sum() == 2
        assert set(df.loc[df["flagged"], "form"]) == {2}

    def test_catenoid_residues_real(self):
        s = _make_sphere_surface("(1/z^2 - 1)/2, i*(1/z^2 + 1)/2, 1/z")
        assert not residues_real_check(s)["flagged"].any()

    def test_tolerance_from_config(self):
        s = _make_sphere_surface("1/z, i/z, 1", punctures=(0, INFINITY))
        assert not residues_real_check(s, config=NumericsConfig(residue_imag_tol=2.0))["flagged"].any()
        assert residues_real_check(s, tol=0.5, config=NumericsConfig(residue_imag_tol=2.0))["flagged"].sum() == 2
