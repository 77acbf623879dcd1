"""Tests for hsurf.evaluation.integrate."""

import numpy as np
import pytest

from hsurf.algebra.parser import parse_forms
from hsurf.algebra.rational import INFINITY
from hsurf.evaluation.integrate import annulus_tail, integrate_annulus, integrate_curvature
from hsurf.surfaces.charts import Annulus, Chart, ChartKind, decompose
from hsurf.surfaces.domains import Domain, SheetPoint
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData


def _make_surface(text: str, punctures=(INFINITY,)) -> SurfaceData:
    forms = [MeromorphicForm.from_wexpr(e) for e in parse_forms(text)]
    return SurfaceData(Domain.sphere(list(punctures)), forms, label=text)


class TestIntegrateCurvature:
    def test_plane_is_flat(self):
        assert integrate_curvature(_make_surface("1, i, 0")) == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.slow
    def test_hyperbolic_paraboloid(self):
        total = integrate_curvature(_make_surface("1, i, z"))
        assert total == pytest.approx(-2 * np.pi, rel=1e-2)

    @pytest.mark.slow
    def test_catenoid(self):
        s = _make_surface("(1/z^2 - 1)/2, i*(1/z^2 + 1)/2, 1/z", (0, INFINITY))
        assert integrate_curvature(s) == pytest.approx(-4 * np.pi, rel=1e-2)

    @pytest.mark.slow
    def test_per_puncture_radii(self):
        s = _make_surface("(1/z^2 - 1)/2, i*(1/z^2 + 1)/2, 1/z", (0, INFINITY))
        # a wide hole at 0 removes curvature
        wide = integrate_curvature(s, r_in={SheetPoint(0): 0.5}, tail=False)
        assert -4 * np.pi < wide < -np.pi

    @pytest.mark.slow
    def test_tail_recovers_excised_disks(self):
        s = _make_surface("(1/z^2 - 1)/2, i*(1/z^2 + 1)/2, 1/z", (0, INFINITY))
        # |z| < 0.3 carries about 8 % of the catenoid's curvature
        truncated = integrate_curvature(s, r_in=0.3, tail=False)
        assert truncated > -0.95 * 4 * np.pi
        assert integrate_curvature(s, r_in=0.3) == pytest.approx(-4 * np.pi, rel=1e-2)


class TestAnnulusTail:
    def test_flat_tail_is_zero(self):
        s = _make_surface("1, i, 0")
        a = decompose(s.domain, r_in=1e-2).annuli[-1]
        assert annulus_tail(s, a, 32, 4, 1.2, 1e-12, 1e-6) == pytest.approx(0.0, abs=1e-9)

    def test_matches_integrated_disk(self):
        # Enneper-type forms: K dA is smooth at 0, so the disk |z| < 0.2 is a plain integral
        s = _make_surface("(1 - z^2)/2, i*(1 + z^2)/2, z")
        a = Annulus(Chart(ChartKind.PLANE, 0j, s.domain), 0.2, 0.5, False)
        tail = annulus_tail(s, a, 64, 8, 1.2, 1e-12, 1e-8)
        disk, _ = integrate_annulus(s, Annulus(a.chart, 1e-6, 0.2, False), 64, 8, 1.2, 1e-12)
        assert tail == pytest.approx(disk, rel=1e-4)
