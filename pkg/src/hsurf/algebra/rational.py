"""Rational functions of one complex variable."""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from hsurf.algebra.polynomials import CPoly, isolate_roots
from hsurf.errors import PoleHit

logger = logging.getLogger(__name__)

# The point at infinity of the Riemann sphere
INFINITY: complex = complex("inf")

# Relative size below which the numerator counts as vanishing at a root
_CANCEL_RTOL: float = 1e-9


def is_infinity(p: complex) -> bool:
    """True if ``p`` is the point at infinity."""
    return cmath.isinf(p)


@dataclass(frozen=True)
class CRational:
    """Quotient ``num/den`` of complex polynomials.

    Values are stored reduced: roots shared by ``num`` and ``den`` are
    cancelled and ``den`` is monic.
    """

    num: CPoly
    den: CPoly

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("CRational denominator is identically zero")
        num, den = _reduced(self.num, self.den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    # --- Construction ---

    @classmethod
    def from_poly(cls, p: CPoly) -> CRational:
        return cls(p, CPoly([1]))

    @classmethod
    def constant(cls, c: complex) -> CRational:
        return cls(CPoly([c]), CPoly([1]))

    @classmethod
    def zero(cls) -> CRational:
        return cls(CPoly(), CPoly([1]))

    @classmethod
    def z(cls) -> CRational:
        return cls(CPoly.z(), CPoly([1]))

    # --- Properties ---

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @property
    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    @property
    def constant_value(self) -> complex:
        if not self.is_constant:
            raise ValueError(f"{self!r} is not constant")
        return complex(self.num(0) / self.den(0)) if not self.is_zero else 0j

    @cached_property
    def poles(self) -> list[tuple[complex, int]]:
        """Finite poles with their orders, from the roots of ``den``.

        Roots cancelled by ``num`` lower the order (possibly to zero).
        """
        out = []
        if self.is_zero:
            return out
        for root, mult in isolate_roots(self.den):
            order = mult - min(mult, _root_multiplicity(self.num, root))
            if order > 0:
                out.append((root, order))
        return out

    @property
    def order_at_infinity(self) -> int:
        """``deg den − deg num`` (valuation of the function at ∞)."""
        if self.is_zero:
            raise ValueError("order at infinity of the zero function")
        return self.den.degree - self.num.degree

    def root_tol(self) -> float:
        """Pole-hit tolerance τ_root."""
        return self.den.root_tol()

    # --- Evaluation ---

    def __call__(self, z):
        return self.num(z) / self.den(z)

    # --- Arithmetic ---

    def _coerce(self, other) -> CRational:
        if isinstance(other, CRational):
            return other
        if isinstance(other, CPoly):
            return CRational.from_poly(other)
        if isinstance(other, (int, float, complex, np.number)):
            return CRational.constant(complex(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return CRational(self.num + other.num, self.den)
        return CRational(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self) -> CRational:
        return CRational(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return CRational(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int) -> CRational:
        if n >= 0:
            return CRational(self.num**n, self.den**n)
        if self.is_zero:
            raise ZeroDivisionError("negative power of the zero rational function")
        return CRational(self.den ** (-n), self.num ** (-n))

    def deriv(self) -> CRational:
        """Derivative by the quotient rule."""
        if self.is_zero:
            return self
        return CRational(
            self.num.deriv() * self.den - self.num * self.den.deriv(), self.den**2
        )

    def reduce(self) -> CRational:
        """No-op: values are reduced on construction."""
        return self

    def __repr__(self) -> str:
        return f"CRational(num={self.num!r}, den={self.den!r})"


def _reduced(num: CPoly, den: CPoly) -> tuple[CPoly, CPoly]:
    """Cancel roots shared by ``num`` and ``den`` and normalise ``den`` to monic."""
    if num.is_zero:
        return CPoly(), CPoly([1])
    if den.degree > 0 and num.degree > 0:
        for root, mult in isolate_roots(den):
            shared = min(mult, _root_multiplicity(num, root))
            if shared:
                factor = CPoly.from_roots([root] * shared)
                num = divmod(num, factor)[0]
                den = divmod(den, factor)[0]
    lead = den.lead
    if lead == 1:
        return num, den
    return num * (1 / lead), den * (1 / lead)


def _root_multiplicity(p: CPoly, root: complex) -> int:
    """Number of times ``root`` is a root of ``p`` (to a relative tolerance)."""
    m = 0
    q = p
    while not q.is_zero:
        scale = sum(abs(c) * abs(root) ** k for k, c in enumerate(q.coeffs))
        if abs(q(root)) > _CANCEL_RTOL * max(scale, 1.0):
            break
        m += 1
        q = q.deriv()
    return m


def eval_rational(r: CRational, z: complex) -> complex:
    """Evaluate ``r`` at ``z``, refusing points within τ_root of a pole.

    Raises
    ------
    PoleHit
        If ``z`` is within τ_root of a pole of ``r``.

    Examples
    --------
    >>> r = CRational(CPoly([1]), CPoly([0, 1]))  # 1/z
    >>> eval_rational(r, 2)
    (0.5+0j)
    """
    tau = r.root_tol()
    for pole, _ in r.poles:
        if abs(z - pole) <= tau:
            raise PoleHit(f"z={z} is within {tau:.1e} of the pole {pole}")
    return complex(r(z))
