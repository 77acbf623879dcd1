"""Complex polynomials in ascending-coefficient form."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from hsurf.errors import FactorizationFailure
from hsurf.tolerances import NEWTON_MAX_ITER, ROOT_CLUSTER_TOL, ROOT_TOL

logger = logging.getLogger(__name__)

# Degree of the zero polynomial
ZERO_DEGREE: int = -1

# Relative size below which a computed top coefficient is dropped
_TRIM_RTOL: float = 1e-15


@dataclass(frozen=True)
class CPoly:
    """Polynomial with complex coefficients, lowest degree first.

    The highest stored coefficient is nonzero unless the polynomial is zero,
    in which case ``coeffs`` is empty and ``degree`` is :data:`ZERO_DEGREE`.

    Examples
    --------
    >>> p = CPoly([-1, 0, 0, 1])  # z³ − 1
    >>> p.degree
    3
    >>> p(2)
    (7+0j)
    """

    coeffs: tuple[complex, ...]

    def __init__(self, coeffs: Iterable[complex | float | int] = ()):
        c = [complex(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    # --- Construction ---

    @classmethod
    def constant(cls, c: complex) -> CPoly:
        return cls([c])

    @classmethod
    def z(cls) -> CPoly:
        """The identity polynomial ``z``."""
        return cls([0, 1])

    @classmethod
    def monomial(cls, n: int, c: complex = 1) -> CPoly:
        return cls([0] * n + [c])

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1) -> CPoly:
        if len(roots) == 0:
            return cls([lead])
        return cls(P.polyfromroots(np.asarray(roots, dtype=complex)) * lead)

    @classmethod
    def _from_array(cls, arr: np.ndarray) -> CPoly:
        """Build from an arithmetic result, dropping round-off top terms."""
        arr = np.atleast_1d(np.asarray(arr, dtype=complex))
        scale = np.max(np.abs(arr)) if arr.size else 0.0
        n = arr.size
        while n > 0 and abs(arr[n - 1]) <= _TRIM_RTOL * scale:
            n -= 1
        return cls(arr[:n])

    # --- Properties ---

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> complex:
        return self.coeffs[-1] if self.coeffs else 0j

    @property
    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs if self.coeffs else [0j], dtype=complex)

    def root_tol(self) -> float:
        """Root-coincidence tolerance τ_root = 1e−10·(1 + max |coeff|)."""
        return ROOT_TOL * (1.0 + self.max_abs)

    def valuation(self, rtol: float = 0.0) -> int:
        """Index of the lowest coefficient larger than ``rtol·max|coeff|``."""
        if self.is_zero:
            return ZERO_DEGREE
        cut = rtol * self.max_abs
        for k, c in enumerate(self.coeffs):
            if abs(c) > cut:
                return k
        return ZERO_DEGREE

    # --- Evaluation ---

    def __call__(self, z):
        if self.is_zero:
            return np.zeros_like(np.asarray(z, dtype=complex))[()]
        return P.polyval(z, self.array)

    # --- Arithmetic ---

    def _coerce(self, other) -> CPoly:
        if isinstance(other, CPoly):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return CPoly([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CPoly._from_array(P.polyadd(self.array, other.array))

    __radd__ = __add__

    def __neg__(self) -> CPoly:
        return CPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CPoly._from_array(P.polysub(self.array, other.array))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            return CPoly()
        return CPoly._from_array(P.polymul(self.array, other.array))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> CPoly:
        if n < 0:
            raise ValueError(f"Negative polynomial power {n}")
        if n == 0:
            return CPoly([1])
        return CPoly._from_array(P.polypow(self.array, n))

    def __divmod__(self, other: CPoly) -> tuple[CPoly, CPoly]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree < other.degree:
            return CPoly(), self
        q, r = P.polydiv(self.array, other.array)
        return CPoly._from_array(q), CPoly._from_array(r)

    def deriv(self, m: int = 1) -> CPoly:
        if self.degree < m:
            return CPoly()
        return CPoly._from_array(P.polyder(self.array, m))

    def integ(self) -> CPoly:
        """Antiderivative with zero constant term."""
        if self.is_zero:
            return CPoly()
        return CPoly._from_array(P.polyint(self.array))

    def shift(self, center: complex) -> CPoly:
        """Coefficients of ``p(center + t)`` in powers of ``t``."""
        if self.degree <= 0:
            return self
        # Horner in the shifted variable
        lin = np.array([complex(center), 1], dtype=complex)
        out = np.array([0j])
        for a in reversed(self.coeffs):
            out = P.polyadd(P.polymul(out, lin), [a])
        return CPoly(out)

    def reverse(self, n: int | None = None) -> CPoly:
        """Coefficients of ``t^n p(1/t)``; ``n`` defaults to the degree."""
        n = self.degree if n is None else n
        if n < self.degree:
            raise ValueError(f"Reversal degree {n} below polynomial degree {self.degree}")
        padded = list(self.coeffs) + [0j] * (n - self.degree)
        return CPoly(padded[::-1])

    def roots(self) -> np.ndarray:
        """Companion-matrix eigenvalues (unpolished)."""
        if self.degree <= 0:
            return np.array([], dtype=complex)
        return P.polyroots(self.array)

    def __repr__(self) -> str:
        return f"CPoly({[complex(c) for c in self.coeffs]})"


def isolate_roots(
    p: CPoly, cluster_tol: float = ROOT_CLUSTER_TOL
) -> list[tuple[complex, int]]:
    """Roots of ``p`` with multiplicities.

    Companion eigenvalues are grouped into clusters; a cluster of size ``m`` is
    polished by Newton's method on ``p^{(m-1)}``, which has a simple root there.
    Exact factors of ``z`` are split off first so monomial denominators are exact.

    Parameters
    ----------
    p : CPoly
        Polynomial of degree ≥ 0.
    cluster_tol : float
        Relative distance below which eigenvalues are merged.

    Returns
    -------
    list[tuple[complex, int]]
        ``(root, multiplicity)`` sorted by real then imaginary part.

    Raises
    ------
    FactorizationFailure
        If a polished root drifts outside its cluster.
    """
    if p.degree <= 0:
        return []

    out: list[tuple[complex, int]] = []
    v = 0
    while v < len(p.coeffs) and p.coeffs[v] == 0:
        v += 1
    if v:
        out.append((0j, v))
        p = CPoly(p.coeffs[v:])
        if p.degree <= 0:
            return out

    raw = p.roots()
    scale = 1.0 + float(np.max(np.abs(raw)))
    radius = cluster_tol * scale

    unassigned = list(range(len(raw)))
    clusters: list[list[complex]] = []
    while unassigned:
        seed = unassigned.pop(0)
        members = [raw[seed]]
        for j in list(unassigned):
            if abs(raw[j] - raw[seed]) < radius:
                members.append(raw[j])
                unassigned.remove(j)
        clusters.append(members)

    for members in clusters:
        m = len(members)
        start = complex(np.mean(members))
        q = p.deriv(m - 1)
        dq = q.deriv()
        r = start
        for _ in range(NEWTON_MAX_ITER):
            d = dq(r)
            if d == 0:
                break
            step = q(r) / d
            r -= step
            if abs(step) <= 1e-15 * scale:
                break
        spread = max(abs(x - start) for x in members)
        if abs(r - start) > 10 * spread + radius:
            raise FactorizationFailure(
                f"Root near {start:.6g} (multiplicity {m}) did not settle: "
                f"polished to {r:.6g}"
            )
        out.append((complex(r), m))

    return sorted(out, key=lambda rm: (round(rm[0].real, 12), round(rm[0].imag, 12)))
