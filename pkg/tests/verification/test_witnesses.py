"""Tests for hsurf.verification.witnesses."""

import pytest

from hsurf.algebra.parser import parse_forms
from hsurf.algebra.rational import INFINITY
from hsurf.surfaces.domains import Domain, SheetPoint
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData
from hsurf.verification.witnesses import (
    Witness,
    WitnessKind,
    format_witnesses,
    normalised_normal,
    parse_witnesses,
    sort_witnesses,
)


def _make_surface(text: str) -> SurfaceData:
    forms = [MeromorphicForm.from_wexpr(e) for e in parse_forms(text)]
    return SurfaceData(Domain.sphere([INFINITY]), forms, label="test")


class TestWitnessFormat:
    def test_format(self):
        w = Witness.pair(WitnessKind.COINCIDENT_PAIR, SheetPoint(1 + 0j), SheetPoint(-1 + 0j), 1e-9)
        assert w.format() == "coincident_pair p=-1,0,0 p=1,0,0 dist=1e-09"

    def test_parse_with_data(self):
        line = "bounded_escape p=0.25,-0.5,1 slope=-0.9 dist=0.125"
        w = Witness.parse(line)
        assert w.kind is WitnessKind.BOUNDED_ESCAPE
        assert w.points == (SheetPoint(0.25 - 0.5j, 1),)
        assert w.data == {"slope": "-0.9"}
        assert w.dist == pytest.approx(0.125)
        assert w.format() == line

    @pytest.mark.parametrize(
        "line, match",
        [
            ("", "Empty"),
            ("nonsense p=0,0,0 dist=1", "Unknown witness kind"),
            ("singular_point p=0,0,0", "no dist"),
            ("singular_point p0,0,0 dist=1", "Malformed"),
        ],
    )
    def test_parse_errors(self, line, match):
        with pytest.raises(ValueError, match=match):
            Witness.parse(line)

    def test_text_block(self):
        ws = [Witness.singular_point(SheetPoint(0.5j), 0.0), Witness.singular_point(SheetPoint(0j), 0.0)]
        text = "# scan output\n" + format_witnesses(ws)
        assert parse_witnesses(text) == ws
        assert format_witnesses([]) == ""

    def test_sort(self):
        a = Witness.singular_point(SheetPoint(1 + 0j), 0.0)
        b = Witness.singular_point(SheetPoint(-1 + 0j), 0.0)
        c = Witness.pair(WitnessKind.COINCIDENT_PAIR, SheetPoint(0j), SheetPoint(1j), 0.0)
        assert sort_witnesses([a, b, c]) == [c, b, a]


class TestResidual:
    def test_normalised_normal(self):
        s = _make_surface("1, i, z")
        # φ = (1, i, 0): |f_x × f_y| = 1, |φ|² = 2
        assert normalised_normal(s, SheetPoint(0j)) == pytest.approx(0.5)

    def test_singular_point_residual(self):
        s = _make_surface("z, i*z, 1")
        assert Witness.singular_point(SheetPoint(0j), 0.0).residual(s) == pytest.approx(0.0, abs=1e-15)

    def test_pair_residual(self):
        # f = (x² - y², -2xy, -y) identifies z and -z on the real axis
        s = _make_surface("2*z, 2*i*z, i")
        w = Witness.pair(WitnessKind.COINCIDENT_PAIR, SheetPoint(0.7 + 0j), SheetPoint(-0.7 + 0j), 0.0)
        assert w.residual(s) == pytest.approx(0.0, abs=1e-12)
