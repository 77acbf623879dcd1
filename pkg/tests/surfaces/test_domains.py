"""Tests for hsurf.surfaces.domains and hsurf.surfaces.charts."""

import cmath
import math

import numpy as np
import pytest

from hsurf.algebra.polynomials import CPoly
from hsurf.algebra.rational import INFINITY
from hsurf.errors import BranchPoint
from hsurf.surfaces.charts import ChartKind, decompose
from hsurf.surfaces.domains import (
    Domain,
    SheetPoint,
    puncture_radius,
    track_branch,
    w_value,
)

CUBIC = CPoly([0, -1, 0, 1])  # z³ − z, roots −1, 0, 1

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _make_curve(**kw) -> Domain:
    return Domain.hyperelliptic(CUBIC, [INFINITY], normalization=(2, math.sqrt(6)), **kw)


def _circle(center: complex, radius: float, start: float = 0.0, n: int = 65) -> list[complex]:
    return [center + radius * cmath.exp(1j * (start + t)) for t in np.linspace(0, 2 * np.pi, n)]


# ---------------------------------------------------------------------------
# SheetPoint
# ---------------------------------------------------------------------------


class TestSheetPoint:
    def test_str(self):
        assert str(SheetPoint(INFINITY)) == "inf"
        assert str(SheetPoint(2, -1)) == "(2+0i, -1)"

    def test_bad_sheet(self):
        with pytest.raises(ValueError, match="sheet"):
            SheetPoint(0, 2)

    def test_hashable(self):
        assert len({SheetPoint(1, 1), SheetPoint(1, 1), SheetPoint(1, -1)}) == 2


# ---------------------------------------------------------------------------
# Domain construction
# ---------------------------------------------------------------------------


class TestDomain:
    def test_sphere(self):
        d = Domain.sphere([0, INFINITY])
        assert d.is_sphere
        assert d.genus == 0
        assert d.branch_points == ()
        assert all(p.sheet == 0 for p in d.punctures)

    def test_distinct_punctures(self):
        with pytest.raises(ValueError, match="not distinct"):
            Domain.sphere([1, 1.0])

    def test_curve_needs_cubic(self):
        with pytest.raises(ValueError, match="cubic"):
            Domain.hyperelliptic(CPoly([-1, 0, 1]))

    def test_curve_needs_distinct_roots(self):
        with pytest.raises(ValueError, match="repeated root"):
            Domain.hyperelliptic(CPoly.from_roots([0, 0, 1]))

    def test_regular_puncture_needs_sheet(self):
        with pytest.raises(ValueError, match="needs a sheet"):
            Domain.hyperelliptic(CUBIC, [2])

    def test_branch_puncture_loses_sheet(self):
        d = Domain.hyperelliptic(CUBIC, [SheetPoint(1, 1)])
        assert d.punctures[0].sheet == 0

    def test_branch_points_default_order(self):
        d = _make_curve()
        np.testing.assert_allclose(d.branch_points, [-1, 0, 1], atol=1e-12)
        assert d.genus == 1

    def test_cut_endpoint_must_be_root(self):
        d = Domain.hyperelliptic(CUBIC, cuts=((-1, 0.5), (1, INFINITY)))
        with pytest.raises(ValueError, match="not a root"):
            d.branch_points

    def test_ramified(self):
        d = _make_curve()
        assert d.is_ramified(INFINITY)
        assert d.is_ramified(0)
        assert not d.is_ramified(0.5)
        assert not Domain.sphere().is_ramified(0)


# ---------------------------------------------------------------------------
# Square root branches
# ---------------------------------------------------------------------------


class TestSquareRoot:
    @pytest.mark.parametrize("z", [0.3 + 0.7j, -2.5 - 0.1j, 4j, 0.5])
    def test_w_squared(self, z):
        d = _make_curve()
        assert d.w_plus(z) ** 2 == pytest.approx(CUBIC(z))

    def test_normalization(self):
        assert w_value(_make_curve(), SheetPoint(2, 1)) == pytest.approx(math.sqrt(6))
        flipped = Domain.hyperelliptic(CUBIC, normalization=(2, -math.sqrt(6)))
        assert w_value(flipped, SheetPoint(2, 1)) == pytest.approx(-math.sqrt(6))

    def test_bad_normalization(self):
        d = Domain.hyperelliptic(CUBIC, normalization=(2, 3))
        with pytest.raises(ValueError, match="does not satisfy"):
            d.w_plus(1j)

    def test_sheet_of(self):
        d = _make_curve()
        z = 0.3 + 0.7j
        assert d.sheet_of(z, d.w_plus(z)) == 1
        assert d.sheet_of(z, -d.w_plus(z)) == -1

    def test_w_value_errors(self):
        d = _make_curve()
        with pytest.raises(BranchPoint):
            w_value(d, SheetPoint(1e-14, 1))
        with pytest.raises(ValueError, match="infinite"):
            w_value(d, SheetPoint(INFINITY))
        with pytest.raises(ValueError, match="hyperelliptic"):
            Domain.sphere().w_plus(1)

    def test_loop_around_one_branch_point_changes_sheet(self):
        d = _make_curve()
        path = _circle(0, 0.5, start=np.pi / 2)
        w0 = d.w_plus(path[0])
        w_end, sheet = track_branch(d, path, w0)
        assert w_end == pytest.approx(-w0, rel=1e-9)
        assert sheet == -1

    def test_loop_around_two_branch_points_keeps_sheet(self):
        d = _make_curve()
        path = _circle(-0.5, 0.9, start=np.pi / 2)
        w0 = d.w_plus(path[0])
        w_end, _ = track_branch(d, path, w0)
        assert w_end == pytest.approx(w0, rel=1e-9)

    def test_track_needs_a_root(self):
        with pytest.raises(ValueError, match="not a square root"):
            track_branch(_make_curve(), [1j, 2j], 5.0)


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------


class TestCharts:
    def test_puncture_radius(self):
        d = Domain.sphere([0, 1, INFINITY])
        assert puncture_radius(d, 0) == pytest.approx(0.4)
        assert puncture_radius(Domain.sphere([0]), 0) == 1.0

    def test_sphere_decomposition(self):
        dec = decompose(Domain.sphere([0, INFINITY]))
        kinds = [a.chart.kind for a in dec.annuli]
        assert kinds == [ChartKind.PLANE, ChartKind.SPHERE_INF]
        assert all(a.puncture for a in dec.annuli)
        assert dec.sheets == 1

    def test_curve_decomposition(self):
        dec = decompose(_make_curve())
        kinds = sorted(a.chart.kind.value for a in dec.annuli)
        assert kinds == ["branch", "branch", "branch", "curve_inf"]
        assert [a.puncture for a in dec.annuli] == [False, False, False, True]
        assert dec.sheets == 2

    def test_core_excludes_holes(self):
        dec = decompose(Domain.sphere([0, INFINITY]))
        assert not dec.core.contains(0.01)
        assert dec.core.contains(dec.core.radius * 0.9)

    def test_branch_chart_covers_w(self):
        dec = decompose(_make_curve())
        chart = dec.annuli[0].chart
        t = 0.05 + 0.02j
        (w,) = chart.w_branches(t)
        assert w**2 == pytest.approx(CUBIC(chart.z(t)))

    def test_curve_infinity_chart(self):
        dec = decompose(_make_curve())
        chart = dec.annuli[-1].chart
        t = 0.1 + 0.05j
        (w,) = chart.w_branches(t)
        assert w**2 == pytest.approx(CUBIC(chart.z(t)))
        assert chart.dz(t) == pytest.approx(-2 / t**3)
