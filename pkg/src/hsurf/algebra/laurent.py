"""Laurent expansions of rational 1-forms ``r(z) dz``.

Expansions are of the *form*, not the function: at a finite point the local
coordinate is ``t = z − p``; at ∞ it is ``ζ = 1/z`` and the Jacobian
``dz = −dζ/ζ²`` is folded into the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hsurf.algebra.polynomials import CPoly
from hsurf.algebra.rational import CRational, is_infinity
from hsurf.algebra.series import series_div
from hsurf.tolerances import SERIES_ZERO_TOL


@dataclass(frozen=True)
class LaurentExpansion:
    """Truncated Laurent series ``Σ coeffs[k] t^(min_degree+k) dt``.

    ``coeffs[0]`` is nonzero whenever ``min_degree < 0``, so the pole order read
    off ``min_degree`` is authoritative.
    """

    center: complex
    min_degree: int
    coeffs: tuple[complex, ...]

    @property
    def pole_order(self) -> int:
        return max(0, -self.min_degree)

    @property
    def leading(self) -> complex:
        return self.coeffs[0]

    def coeff(self, degree: int) -> complex:
        """Coefficient of ``t^degree`` (0 outside the stored window)."""
        k = degree - self.min_degree
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0j

    def principal_part(self) -> dict[int, complex]:
        """``{j: coefficient of t^(−j)}`` for ``j ≥ 1``."""
        return {
            -d: self.coeff(d)
            for d in range(self.min_degree, 0)
            if self.coeff(d) != 0
        }

    def local(self, t):
        """Sum the truncated series at local coordinate ``t``."""
        t = np.asarray(t, dtype=complex)
        out = np.zeros_like(t)
        for k, c in enumerate(self.coeffs):
            out = out + c * t ** (self.min_degree + k)
        return out[()]

    def resum(self, z):
        """Reconstruct the ``dz`` coefficient ``r(z)`` near the center."""
        z = np.asarray(z, dtype=complex)
        if is_infinity(self.center):
            zeta = 1 / z
            return (-(zeta**2) * self.local(zeta))[()]
        return self.local(z - self.center)


def _lowest(p: CPoly) -> tuple[int, np.ndarray]:
    """Valuation of ``p`` (round-off aware) and the coefficients above it."""
    v = p.valuation(SERIES_ZERO_TOL)
    return v, np.asarray(p.coeffs[v:], dtype=complex)


def laurent_at(r: CRational, p: complex, n_terms: int) -> LaurentExpansion:
    """Laurent expansion of the form ``r(z) dz`` at ``p`` (finite or ∞).

    Parameters
    ----------
    r : CRational
        Coefficient of ``dz``; must not be identically zero.
    p : complex
        Center; pass :data:`~hsurf.algebra.rational.INFINITY` for ∞.
    n_terms : int
        Number of coefficients to keep, starting at the leading one.

    Returns
    -------
    LaurentExpansion
        ``min_degree`` is minus the pole order of the form (holomorphic points
        give ``min_degree ≥ 0``).

    Examples
    --------
    >>> laurent_at(CRational.z(), INFINITY, 1).pole_order  # z dz at ∞
    3
    >>> laurent_at(CRational.constant(1), INFINITY, 1).pole_order  # dz at ∞
    2
    """
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    if r.is_zero:
        raise ValueError("Laurent expansion of the zero form")

    if is_infinity(p):
        # r(1/ζ) = ζ^(dd−dn) · rev(num)(ζ)/rev(den)(ζ); dz = −ζ^(−2) dζ
        vn, num = _lowest(r.num.reverse())
        vd, den = _lowest(r.den.reverse())
        shift = r.den.degree - r.num.degree - 2
        coeffs = -series_div(num, den, n_terms)
    else:
        vn, num = _lowest(r.num.shift(p))
        vd, den = _lowest(r.den.shift(p))
        shift = 0
        coeffs = series_div(num, den, n_terms)

    return LaurentExpansion(
        center=complex(p),
        min_degree=shift + vn - vd,
        coeffs=tuple(complex(c) for c in coeffs),
    )


def function_series(r: CRational, p: complex, n_terms: int) -> LaurentExpansion:
    """Laurent series of the *function* ``r`` at ``p``.

    At ∞ the variable is ``s = 1/z``, with no Jacobian: ``r(1/s) = Σ c_k s^(v+k)``.
    The zero function gives an empty expansion with ``min_degree = 0``.
    """
    if r.is_zero:
        return LaurentExpansion(complex(p), 0, ())
    if is_infinity(p):
        vn, num = _lowest(r.num.reverse())
        vd, den = _lowest(r.den.reverse())
        shift = r.den.degree - r.num.degree
    else:
        vn, num = _lowest(r.num.shift(p))
        vd, den = _lowest(r.den.shift(p))
        shift = 0
    coeffs = series_div(num, den, n_terms)
    return LaurentExpansion(
        center=complex(p),
        min_degree=shift + vn - vd,
        coeffs=tuple(complex(c) for c in coeffs),
    )


def form_order(r: CRational, p: complex) -> int:
    """Pole order of ``r(z) dz`` at ``p`` (0 where holomorphic)."""
    if r.is_zero:
        return 0
    return laurent_at(r, p, 1).pole_order
