"""Tests for hsurf.verification.properness."""

import numpy as np
import pytest

from hsurf.algebra.parser import parse_forms
from hsurf.algebra.rational import INFINITY
from hsurf.evaluation.evaluate import Evaluator
from hsurf.surfaces.domains import Domain, SheetPoint
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData
from hsurf.verification.properness import (
    Escapes,
    _CirclePoints,
    circle_minimum,
    parametric_curve,
    properness_probe,
)
from hsurf.verification.witnesses import Witness, WitnessKind


def _make_surface(text: str, punctures=(INFINITY,)) -> SurfaceData:
    forms = [MeromorphicForm.from_wexpr(e) for e in parse_forms(text)]
    return SurfaceData(Domain.sphere(list(punctures)), forms, label=text)


class TestProperness:
    def test_graph_escapes_at_infinity(self):
        result = properness_probe(_make_surface("1, i, z"), "inf")
        assert isinstance(result, Escapes)
        assert result.slope > 0
        assert result.puncture.is_infinity
        assert "Escapes" in str(result)

    def test_catenoid_escapes_at_zero(self):
        s = _make_surface("(1/z^2 - 1)/2, i*(1/z^2 + 1)/2, 1/z", (0, INFINITY))
        assert isinstance(properness_probe(s, 0), Escapes)

    def test_bounded_escape(self):
        # f3 = -Re(1/z) vanishes along the imaginary axis, so |f| -> 0 there
        s = _make_surface("1, i, 1/z^2", (0, INFINITY))
        result = properness_probe(s, SheetPoint(0))
        assert isinstance(result, Witness)
        assert result.kind is WitnessKind.BOUNDED_ESCAPE
        assert result.dist < 0.5
        assert all(abs(p.z.real) < 1e-3 * max(abs(p.z), 1e-300) + 1e-9 for p in result.points)

    @pytest.mark.parametrize(
        "text",
        [
            "1, i, 1/z^2 + 1/z",
            "1, i, 1/z^3 + 1/z",
            "1, i, 1/z^4 + 2/z^2",
        ],
    )
    def test_high_order_pole_in_one_form_is_not_proper(self, text):
        # f1 and f2 stay bounded while f3 vanishes on narrowing sectors
        result = properness_probe(_make_surface(text, (0, INFINITY)), 0)
        assert isinstance(result, Witness)
        assert result.kind is WitnessKind.BOUNDED_ESCAPE
        assert result.dist < 2.0

    def test_minimum_found_in_narrow_valley(self):
        s = _make_surface("1, i, 1/z^4 + 2/z^2", (0, INFINITY))
        _, m, resolution = circle_minimum(Evaluator(s), _CirclePoints(s, SheetPoint(0)), 1e-3, 720)
        assert m < 2.0
        assert resolution < 1e-3

    def test_along_curve(self):
        curve = parametric_curve("1/z", (1e-1, 1e-4), n=20)
        result = properness_probe(_make_surface("1, i, z"), "inf", curve=curve)
        assert isinstance(result, Escapes)

    def test_bounded_along_curve(self):
        s = _make_surface("1, i, 1/z^2", (0, INFINITY))
        curve = parametric_curve("i*z", (1e-1, 1e-4), n=20)
        assert isinstance(properness_probe(s, 0, curve=curve), Witness)

    def test_not_a_puncture(self):
        with pytest.raises(ValueError, match="not a puncture"):
            properness_probe(_make_surface("1, i, z"), 2.0)

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="Unknown puncture"):
            properness_probe(_make_surface("1, i, z"), "north")


class TestParametricCurve:
    def test_geometric_samples(self):
        pts = parametric_curve("z + i*z^2", (0.1, 1.0), n=5)
        t = np.geomspace(0.1, 1.0, 5)
        assert pts == pytest.approx(t + 1j * t**2)

    def test_params(self):
        pts = parametric_curve("c*z", (1.0, 2.0), n=2, params={"c": 3})
        assert pts == pytest.approx([3, 6])
