"""Residues and closed-form antiderivatives of rational functions."""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from hsurf.algebra.laurent import laurent_at
from hsurf.algebra.polynomials import CPoly
from hsurf.algebra.rational import CRational
from hsurf.errors import FactorizationFailure

logger = logging.getLogger(__name__)

# Relative mismatch tolerated when re-differentiating an antiderivative
_CHECK_RTOL: float = 1e-6


def residue(r: CRational, p: complex) -> complex:
    """Residue of the form ``r(z) dz`` at ``p``.

    At a finite point this is the coefficient of ``(z−p)^(−1)``; at ∞ it is
    taken in the chart ``ζ = 1/z``. Regular points give 0.

    Examples
    --------
    >>> residue(CRational(CPoly([1]), CPoly([0, 1])), 0)  # 1/z at 0
    (1+0j)
    """
    if r.is_zero:
        return 0j
    lead = laurent_at(r, p, 1)
    if lead.min_degree >= 0:
        return 0j
    return laurent_at(r, p, -lead.min_degree).coeff(-1)


@dataclass(frozen=True)
class Antiderivative:
    """``F = rational + Σ res·log(z − pole)`` with ``F' = r``.

    Unpacks as ``(rational, log_terms)``.
    """

    rational: CRational
    log_terms: tuple[tuple[complex, complex], ...]

    def __iter__(self) -> Iterator:
        yield self.rational
        yield list(self.log_terms)

    def __call__(self, z):
        """Principal-branch value of ``F(z)``."""
        z = np.asarray(z, dtype=complex)
        out = self.rational(z) + 0j
        for pole, res in self.log_terms:
            out = out + res * np.log(z - pole)
        return out[()]

    def real_part(self, z):
        """``Re F(z)``; single valued when every residue is real."""
        z = np.asarray(z, dtype=complex)
        out = np.real(self.rational(z))
        for pole, res in self.log_terms:
            d = z - pole
            out = out + res.real * np.log(np.abs(d)) - res.imag * np.angle(d)
        return out[()]

    def derivative(self, z):
        """``F'(z)``, for checking against the integrand."""
        z = np.asarray(z, dtype=complex)
        out = self.rational.deriv()(z) + 0j
        for pole, res in self.log_terms:
            out = out + res / (z - pole)
        return out[()]


def antiderivative(r: CRational) -> Antiderivative:
    """Closed-form antiderivative of ``r``.

    The polynomial part of ``r`` integrates termwise; each finite pole
    contributes its principal part, with order ≥ 2 terms going into the
    rational part and the residue into a log term.

    Raises
    ------
    FactorizationFailure
        If the poles of ``r`` cannot be isolated, or the result fails the
        differentiation check.

    Examples
    --------
    >>> F = antiderivative(CRational.z())
    >>> F.rational.num.coeffs, F.log_terms
    ((0j, 0j, (0.5+0j)), ())
    """
    if r.is_zero:
        return Antiderivative(CRational.zero(), ())

    q, _ = divmod(r.num, r.den)
    poles = r.poles
    scale = 1.0 + max((abs(c) for c in r.num.coeffs), default=0.0)

    # Common denominator D = Π (z − p)^(m−1) over higher-order poles
    factors = {p: CPoly.from_roots([p] * (m - 1)) for p, m in poles if m >= 2}
    D = CPoly([1])
    for f in factors.values():
        D = D * f
    N = q.integ() * D

    log_terms: list[tuple[complex, complex]] = []
    for p, m in poles:
        parts = laurent_at(r, p, m).principal_part()
        others = CPoly([1])
        for p2, f in factors.items():
            if p2 != p:
                others = others * f
        for j, c in parts.items():
            if j == 1:
                continue
            N = N + others * CPoly.from_roots([p] * (m - j)) * (c / (1 - j))
        res = parts.get(1, 0j)
        if abs(res) > 1e-14 * scale:
            log_terms.append((p, res))

    F = Antiderivative(CRational(N, D), tuple(log_terms))
    _check(F, r)
    return F


def _check(F: Antiderivative, r: CRational) -> None:
    """Verify ``F' = r`` at a few points away from the poles."""
    poles = [p for p, _ in r.poles]
    radius = 1.0 + max((abs(p) for p in poles), default=0.0)
    probes = radius * np.exp(1j * np.array([0.3, 1.9, 4.1])) * 1.37
    got = F.derivative(probes)
    want = r(probes)
    err = np.max(np.abs(got - want) / (1.0 + np.abs(want)))
    if not err < _CHECK_RTOL:
        raise FactorizationFailure(
            f"Antiderivative check failed (relative error {err:.2e}); "
            f"poles {poles} could not be isolated cleanly"
        )

