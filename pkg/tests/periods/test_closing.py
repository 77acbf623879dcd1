"""Tests for hsurf.periods.closing."""

from unittest.mock import patch

import numpy as np
import pytest

from hsurf.algebra.parser import parse_forms
from hsurf.algebra.polynomials import CPoly
from hsurf.algebra.rational import INFINITY
from hsurf.config import DEFAULT_CONFIG
from hsurf.errors import NoBracket, PeriodsNotClosed
from hsurf.periods.closing import (
    FreeParam,
    PeriodProblem,
    close_periods,
    period_report,
    verify_closed,
)
from hsurf.periods.cycles import CollapsedInterval, PunctureLoop, real_period
from hsurf.surfaces.domains import Domain, SheetPoint
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData

LOOP_0 = PunctureLoop(SheetPoint(0))
CATENOID = "(1/z^2 - 1)/2, i*(1/z^2 + 1)/2, 1/z"

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _make_surface(text: str, params=None) -> SurfaceData:
    forms = [MeromorphicForm.from_wexpr(e) for e in parse_forms(text, None, params)]
    return SurfaceData(Domain.sphere([0, INFINITY]), forms, label="test")


def _template(text: str):
    return lambda values: _make_surface(text, values)


def _make_problem(text: str = "i*(l - 0.3)/z + 1, i, z") -> PeriodProblem:
    fp = FreeParam("l", 1, LOOP_0, (-1.0, 1.0))
    return PeriodProblem.from_surface_template(_template(text), [fp], [LOOP_0])


# ---------------------------------------------------------------------------
# FreeParam / PeriodProblem
# ---------------------------------------------------------------------------


class TestFreeParam:
    def test_bad_form_index(self):
        with pytest.raises(ValueError, match="form_index"):
            FreeParam("l", 0, LOOP_0, (0.0, 1.0))

    def test_empty_bracket(self):
        with pytest.raises(ValueError, match="lo < hi"):
            FreeParam("l", 1, LOOP_0, (1.0, 1.0))


class TestPeriodProblem:
    def test_generator_is_parameter_coefficient(self):
        problem = _make_problem()
        g1, g2, g3 = problem.generators["l"]
        assert g1(0.5) == pytest.approx(2j)
        assert g2.is_zero and g3.is_zero

    def test_target_period_is_linear(self):
        problem = _make_problem()
        # Re ∮ i(l - 0.3)/z dz = -2π(l - 0.3)
        assert problem.target_period(0, {"l": 0.0}) == pytest.approx(0.6 * np.pi)
        assert problem.target_period(0, {"l": 1.0}) == pytest.approx(-1.4 * np.pi)

    def test_instantiate(self):
        s = _make_problem().instantiate({"l": 0.3})
        assert s.omega[0](0.5) == pytest.approx(1)

    def test_rejects_non_affine_template(self):
        fp = FreeParam("l", 1, LOOP_0, (-1.0, 1.0))
        with pytest.raises(ValueError, match="not affine"):
            PeriodProblem.from_surface_template(_template("i*l^2/z + 1, i, z"), [fp])


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------


class TestClosePeriods:
    def test_linear_solve(self):
        (value,) = close_periods(_make_problem())
        assert value == pytest.approx(0.3, abs=1e-9)

    def test_constant_sign_raises_no_bracket(self):
        with pytest.raises(NoBracket, match="constant sign"):
            close_periods(_make_problem("(l + 0.3*i)/z + 1, i, z"))

    def test_no_free_params_verifies(self):
        problem = PeriodProblem(_make_surface(CATENOID), [], {}, [LOOP_0])
        assert close_periods(problem) == []

    def test_no_free_params_open_periods(self):
        problem = PeriodProblem(_make_surface("1, i/z, z"), [], {}, [LOOP_0])
        with pytest.raises(PeriodsNotClosed):
            close_periods(problem)

    def test_cache_round_trip(self, tmp_path):
        config = DEFAULT_CONFIG.replace(cache=tmp_path)
        key = {"fixture": "test"}
        (first,) = close_periods(_make_problem(), config, cache_key=key)
        assert len(list(tmp_path.glob("periods-*.json"))) == 1

        with patch("hsurf.periods.closing.form_cycle_integral") as integral:
            (second,) = close_periods(_make_problem(), config, cache_key=key)
        integral.assert_not_called()
        assert second == pytest.approx(first)

    def test_no_cache_without_key(self, tmp_path):
        close_periods(_make_problem(), DEFAULT_CONFIG.replace(cache=tmp_path))
        assert not list(tmp_path.glob("periods-*.json"))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class TestPeriodReport:
    def test_catenoid_is_closed(self):
        report = period_report(_make_surface(CATENOID))
        assert list(report.columns) == ["cycle", "form", "re", "im", "flagged"]
        assert len(report) == 6
        assert not report["flagged"].any()
        verify_closed(_make_surface(CATENOID), [])

    def test_flags_open_periods(self):
        report = period_report(_make_surface("1, i/z, z"))
        flagged = report[report["flagged"]]
        assert len(flagged) == 2
        assert set(flagged["form"]) == {2}

    def test_puncture_loops_not_duplicated(self):
        report = period_report(_make_surface(CATENOID), [LOOP_0])
        assert len(report) == 6

    def test_verify_closed_raises(self):
        with pytest.raises(PeriodsNotClosed, match="real period"):
            verify_closed(_make_surface("1, i/z, z"), [])

    def test_curve_adds_homology_basis(self):
        cubic = CPoly([0, -1, 0, 1])
        forms = [MeromorphicForm.from_wexpr(e) for e in parse_forms("1/w, i/w, z/w", cubic)]
        s = SurfaceData(Domain.hyperelliptic(cubic, [INFINITY]), forms, label="curve")
        report = period_report(s)
        intervals = report[report["cycle"].str.startswith("interval")]
        assert len(intervals) == 6
        assert intervals["cycle"].nunique() == 2
        # w is real on [-1, 0] and imaginary on [0, 1]
        assert intervals[intervals["form"] == 1]["flagged"].sum() == 1
        assert intervals[intervals["form"] == 2]["flagged"].sum() == 1
        assert not period_report(s, [])["cycle"].str.startswith("interval").any()


class TestPeriodLinearity:
    def test_real_period_is_linear_in_parameter(self):
        cubic = CPoly([0, -1, 0, 1])
        cycle = CollapsedInterval(-1, 0)
        domain = Domain.hyperelliptic(cubic, [INFINITY])

        def period(lam: float) -> float:
            forms = [MeromorphicForm.from_wexpr(e) for e in parse_forms("(1 + l*z)/w, i/w, z/w", cubic, {"l": lam})]
            return real_period(SurfaceData(domain, forms, label="linear"), 1, cycle)

        p0, p1 = period(0.0), period(1.0)
        assert abs(p1 - p0) > 1e-3
        rng = np.random.default_rng(11)
        for lam in rng.uniform(-5, 5, 20):
            assert period(lam) == pytest.approx(p0 + lam * (p1 - p0), rel=1e-7, abs=1e-8)
