"""Tests for hsurf.algebra.polynomials and hsurf.algebra.rational."""

import numpy as np
import pytest

from hsurf.algebra.polynomials import CPoly, isolate_roots
from hsurf.algebra.rational import INFINITY, CRational, eval_rational, is_infinity
from hsurf.errors import PoleHit

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _roots_close(got, want, tol=1e-8):
    assert len(got) == len(want)
    for (r, m), (r_want, m_want) in zip(got, want):
        assert m == m_want
        assert abs(r - r_want) < tol


# ---------------------------------------------------------------------------
# CPoly
# ---------------------------------------------------------------------------


class TestCPoly:
    def test_trailing_zeros_dropped(self):
        p = CPoly([1, 2, 0, 0])
        assert p.degree == 1
        assert p.coeffs == (1 + 0j, 2 + 0j)

    def test_zero_polynomial(self):
        p = CPoly()
        assert p.is_zero
        assert p.degree == -1
        assert p(3.0) == 0

    def test_evaluation(self):
        p = CPoly([-1, 0, 0, 1])
        assert p(2) == pytest.approx(7)
        np.testing.assert_allclose(p(np.array([0.0, 1.0])), [-1, 0])

    def test_arithmetic(self):
        z = CPoly.z()
        p = (z - 1) * (z + 1)
        np.testing.assert_allclose(p.array, [-1, 0, 1])
        assert (p + 1).degree == 2
        assert (2 - z).coeffs == (2 + 0j, -1 + 0j)

    def test_power(self):
        p = CPoly([1, 1]) ** 3
        np.testing.assert_allclose(p.array, [1, 3, 3, 1])
        assert (CPoly([1, 1]) ** 0).coeffs == (1 + 0j,)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError, match="Negative"):
            CPoly([1, 1]) ** -1

    def test_divmod(self):
        q, r = divmod(CPoly([-1, 0, 1]), CPoly([-1, 1]))
        np.testing.assert_allclose(q.array, [1, 1])
        assert r.is_zero

    def test_divmod_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            divmod(CPoly([1, 1]), CPoly())

    def test_deriv_and_integ(self):
        p = CPoly([1, 2, 3])
        np.testing.assert_allclose(p.deriv().array, [2, 6])
        np.testing.assert_allclose(p.integ().deriv().array, p.array)
        assert CPoly([5]).deriv().is_zero

    def test_shift(self):
        # p(z) = z², p(1 + t) = 1 + 2t + t²
        np.testing.assert_allclose(CPoly([0, 0, 1]).shift(1).array, [1, 2, 1])

    def test_reverse(self):
        np.testing.assert_allclose(CPoly([1, 2]).reverse(3).array, [0, 0, 2, 1])

    def test_reverse_below_degree(self):
        with pytest.raises(ValueError, match="below polynomial degree"):
            CPoly([1, 2, 3]).reverse(1)

    def test_from_roots(self):
        p = CPoly.from_roots([1, -1], lead=2)
        np.testing.assert_allclose(p.array, [-2, 0, 2])


# ---------------------------------------------------------------------------
# Root isolation
# ---------------------------------------------------------------------------


class TestIsolateRoots:
    def test_simple_roots_sorted(self):
        got = isolate_roots(CPoly([-1, 0, 0, 1]))
        s = np.sqrt(3) / 2
        _roots_close(got, [(-0.5 - s * 1j, 1), (-0.5 + s * 1j, 1), (1, 1)])

    def test_double_root(self):
        _roots_close(isolate_roots(CPoly.from_roots([1, 1, 2])), [(1, 2), (2, 1)])

    def test_exact_zero_factor(self):
        got = isolate_roots(CPoly([0, 0, 1, 1]))
        assert got[1] == (0j, 2)
        _roots_close(got, [(-1, 1), (0, 2)])

    def test_constant_has_no_roots(self):
        assert isolate_roots(CPoly([3])) == []


# ---------------------------------------------------------------------------
# CRational
# ---------------------------------------------------------------------------


class TestCRational:
    def test_zero_denominator(self):
        with pytest.raises(ValueError, match="denominator"):
            CRational(CPoly([1]), CPoly())

    def test_poles_with_orders(self):
        r = CRational(CPoly([1]), CPoly.from_roots([0, 0, 3]))
        _roots_close(r.poles, [(0, 2), (3, 1)])

    def test_cancelled_pole_dropped(self):
        r = CRational(CPoly.from_roots([1]), CPoly.from_roots([1, 2]))
        _roots_close(r.poles, [(2, 1)])
        assert r.reduce().den.degree == 1

    def test_reduced_on_construction(self):
        r = CRational(CPoly.from_roots([1, -1]) * 2, CPoly.from_roots([1]) * 4)
        assert r.den.degree == 0
        assert r.den.lead == pytest.approx(1)
        np.testing.assert_allclose(r.num.coeffs, [0.5, 0.5], atol=1e-10)

    def test_sum_is_reduced(self):
        z = CRational.z()
        r = (z - 1) / (z**2 - 1) + CRational.constant(0)
        assert r.den.degree == 1
        assert r.poles[0][0] == pytest.approx(-1)

    def test_order_at_infinity(self):
        r = CRational(CPoly([1]), CPoly([0, 0, 1]))
        assert r.order_at_infinity == 2
        with pytest.raises(ValueError):
            CRational.zero().order_at_infinity

    def test_arithmetic(self):
        z = CRational.z()
        r = (z + 1) / (z - 1)
        assert r(3) == pytest.approx(2)
        assert (1 / z)(4) == pytest.approx(0.25)
        assert (z**-2)(2) == pytest.approx(0.25)
        assert r.deriv()(3) == pytest.approx(-0.5)

    def test_divide_by_zero_function(self):
        with pytest.raises(ZeroDivisionError):
            CRational.z() / CRational.zero()

    def test_constant_value(self):
        assert CRational.constant(2j).constant_value == 2j
        with pytest.raises(ValueError, match="not constant"):
            CRational.z().constant_value

    def test_eval_rational_pole_hit(self):
        r = CRational(CPoly([1]), CPoly([0, 1]))
        assert eval_rational(r, 2) == pytest.approx(0.5)
        with pytest.raises(PoleHit):
            eval_rational(r, 1e-12)

    def test_infinity(self):
        assert is_infinity(INFINITY)
        assert not is_infinity(1e300)
