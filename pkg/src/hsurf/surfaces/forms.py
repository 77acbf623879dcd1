"""Meromorphic 1-forms and the surface data triple Ω = (ω1, ω2, ω3)."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pandas as pd

from hsurf.algebra.calculus import Antiderivative, antiderivative
from hsurf.algebra.laurent import LaurentExpansion, function_series, laurent_at
from hsurf.algebra.parser import WExpr
from hsurf.algebra.polynomials import CPoly
from hsurf.algebra.rational import CRational, is_infinity
from hsurf.algebra.series import series_div, series_sqrt
from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.surfaces.domains import Domain, SheetPoint, w_value
from hsurf.tolerances import SERIES_ZERO_TOL

logger = logging.getLogger(__name__)

# Terms kept in each part of a local expansion before merging
_LOCAL_TERMS: int = 12


@dataclass(frozen=True)
class MeromorphicForm:
    """``ω = (a(z) + b(z)/w) dz``; ``b`` vanishes on the sphere."""

    a: CRational
    b: CRational = field(default_factory=CRational.zero)

    @classmethod
    def from_wexpr(cls, e: WExpr) -> MeromorphicForm:
        return cls(e.a, e.b)

    @classmethod
    def from_rational(cls, r: CRational) -> MeromorphicForm:
        return cls(r, CRational.zero())

    @property
    def is_zero(self) -> bool:
        return self.a.is_zero and self.b.is_zero

    @property
    def has_w(self) -> bool:
        return not self.b.is_zero

    def __call__(self, z, w=None):
        """Coefficient φ of ``dz`` at ``(z, w)``."""
        out = self.a(z) + 0j
        if self.has_w:
            if w is None:
                raise ValueError("w is required to evaluate a form with a dz/w part")
            out = out + self.b(z) / w
        return out

    def deriv(self, z, w=None, branch_poly: CPoly | None = None):
        """``dφ/dz`` using ``w' = p'/(2w)``."""
        out = self.a.deriv()(z) + 0j
        if self.has_w:
            dp = branch_poly.deriv()(z)
            out = out + self.b.deriv()(z) / w - self.b(z) * dp / (2 * w**3)
        return out

    def __add__(self, other: MeromorphicForm) -> MeromorphicForm:
        return MeromorphicForm((self.a + other.a).reduce(), (self.b + other.b).reduce())

    def __sub__(self, other: MeromorphicForm) -> MeromorphicForm:
        return self + other.scale(-1)

    def scale(self, c: complex) -> MeromorphicForm:
        return MeromorphicForm(self.a * complex(c), self.b * complex(c))

    def __mul__(self, c):
        if isinstance(c, (int, float, complex, np.number)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__


def combine(forms: Sequence[MeromorphicForm], weights: Sequence[float]) -> MeromorphicForm:
    """Real-linear combination ``Σ weights[i]·forms[i]``."""
    out = MeromorphicForm(CRational.zero())
    for f, c in zip(forms, weights, strict=True):
        if c != 0:
            out = out + f.scale(c)
    return out


@dataclass(frozen=True)
class SurfaceData:
    """Domain, the form triple and the basepoint of ``f = Re ∫ Ω``.

    ``basepoint`` may be None, in which case evaluation picks a default
    (the sphere uses the raw antiderivative without subtraction).
    """

    domain: Domain
    omega: tuple[MeromorphicForm, MeromorphicForm, MeromorphicForm]
    basepoint: SheetPoint | None = None
    label: str = ""

    def __post_init__(self):
        omega = tuple(self.omega)
        if len(omega) != 3:
            raise ValueError(f"Expected three forms, got {len(omega)}")
        if self.domain.is_sphere and any(f.has_w for f in omega):
            raise ValueError("Forms on a sphere domain cannot have a dz/w part")
        object.__setattr__(self, "omega", omega)

    @property
    def genus(self) -> int:
        return self.domain.genus

    @property
    def punctures(self) -> tuple[SheetPoint, ...]:
        return self.domain.punctures

    @cached_property
    def antiderivatives(self) -> tuple[Antiderivative, ...]:
        """Closed-form antiderivatives of the ``dz`` parts."""
        return tuple(antiderivative(f.a) for f in self.omega)

    def with_omega(self, omega: Sequence[MeromorphicForm]) -> SurfaceData:
        return SurfaceData(self.domain, tuple(omega), self.basepoint, self.label)

    def phi(self, z, w=None) -> np.ndarray:
        """φ = (φ1, φ2, φ3) at ``(z, w)``, stacked on the last axis."""
        return np.stack([f(z, w) for f in self.omega], axis=-1)

    def dphi(self, z, w=None) -> np.ndarray:
        p = self.domain.branch_poly
        return np.stack([f.deriv(z, w, p) for f in self.omega], axis=-1)

    def __repr__(self) -> str:
        return f"SurfaceData({self.label or 'unnamed'}, {self.domain.kind.value}, {len(self.punctures)} punctures)"


# ---------------------------------------------------------------------------
# Local expansions
# ---------------------------------------------------------------------------


def _merge(center: complex, terms: dict[int, complex], n_terms: int) -> LaurentExpansion:
    """Build an expansion from ``{exponent: coefficient}``, dropping round-off."""
    scale = max((abs(c) for c in terms.values()), default=0.0)
    live = {k: c for k, c in terms.items() if abs(c) > SERIES_ZERO_TOL * scale}
    if not live:
        return LaurentExpansion(center, 0, (0j,))
    lo = min(live)
    hi = lo + n_terms
    coeffs = tuple(live.get(k, 0j) for k in range(lo, hi))
    return LaurentExpansion(center, lo, coeffs)


def _add_series(terms: dict[int, complex], v: int, coeffs, step: int, offset: int, factor: complex):
    """Accumulate ``factor·Σ coeffs[k] t^(step·(v+k) + offset)``."""
    for k, c in enumerate(coeffs):
        e = step * (v + k) + offset
        terms[e] = terms.get(e, 0j) + factor * c


def local_expansion(
    f: MeromorphicForm, d: Domain, p: SheetPoint, n_terms: int = 6
) -> LaurentExpansion:
    """Expansion of ``f`` at ``p`` in the local coordinate ``t`` of the domain.

    Charts: ``z = p + t`` (sphere and regular curve points), ``z = 1/t`` (∞ on the
    sphere), ``z = e + t²`` (branch points) and ``z = 1/t²`` (∞ on the curve).
    """
    n = max(n_terms, 1) + _LOCAL_TERMS
    center = p.z
    if d.is_sphere:
        if f.a.is_zero:
            return LaurentExpansion(center, 0, (0j,))
        return laurent_at(f.a, center, n_terms)

    poly = d.branch_poly
    terms: dict[int, complex] = {}
    if is_infinity(center):
        # z = 1/t², dz = −2 t^(−3) dt, w = S(t)/t³ with S² = rev p(t²)
        sq = series_sqrt(poly.reverse(3).coeffs, n)
        if not f.a.is_zero:
            fa = function_series(f.a, center, n)
            _add_series(terms, fa.min_degree, fa.coeffs, 2, -3, -2)
        if f.has_w:
            fb = function_series(f.b, center, n)
            ratio = series_div(fb.coeffs, sq, n)
            _add_series(terms, fb.min_degree, ratio, 2, 0, -2)
    elif d.is_ramified(center):
        # z = e + t², dz = 2t dt, w = t·Q(t²) with Q² = p(e+s)/s
        e = min(d.branch_points, key=lambda r: abs(r - center))
        q = poly.shift(e).coeffs[1:]
        sq = series_sqrt(q, n)
        if not f.a.is_zero:
            fa = function_series(f.a, e, n)
            _add_series(terms, fa.min_degree, fa.coeffs, 2, 1, 2)
        if f.has_w:
            fb = function_series(f.b, e, n)
            ratio = series_div(fb.coeffs, sq, n)
            _add_series(terms, fb.min_degree, ratio, 2, 0, 2)
    else:
        w0 = w_value(d, p)
        ws = series_sqrt(poly.shift(center).coeffs, n, s0=w0)
        if not f.a.is_zero:
            fa = function_series(f.a, center, n)
            _add_series(terms, fa.min_degree, fa.coeffs, 1, 0, 1)
        if f.has_w:
            fb = function_series(f.b, center, n)
            ratio = series_div(fb.coeffs, ws, n)
            _add_series(terms, fb.min_degree, ratio, 1, 0, 1)
    return _merge(center, terms, n_terms)


def form_pole_order(f: MeromorphicForm, d: Domain, p: SheetPoint) -> int:
    """Pole order of ``f`` at ``p`` in the local chart (0 where holomorphic)."""
    if f.is_zero:
        return 0
    return local_expansion(f, d, p).pole_order


def form_residue(f: MeromorphicForm, d: Domain, p: SheetPoint) -> complex:
    """Residue of ``f`` at ``p`` (coefficient of ``t^(−1)`` in the local chart)."""
    if f.is_zero:
        return 0j
    order = form_pole_order(f, d, p)
    if order == 0:
        return 0j
    return local_expansion(f, d, p, n_terms=order + 1).coeff(-1)


def residues_real_check(
    s: SurfaceData, tol: float | None = None, config: NumericsConfig = DEFAULT_CONFIG
) -> pd.DataFrame:
    """Residue of every form at every puncture, with ``|Im| > tol`` flagged.

    ``tol`` defaults to ``config.residue_imag_tol``.

    Returns
    -------
    pd.DataFrame
        Columns ``puncture``, ``form``, ``re``, ``im``, ``flagged``.
    """
    tol = config.residue_imag_tol if tol is None else tol
    rows = []
    for p in s.punctures:
        for i, f in enumerate(s.omega, start=1):
            res = form_residue(f, s.domain, p)
            flagged = abs(res.imag) > tol
            if flagged:
                logger.warning(f"{s.label}: residue of ω{i} at {p} is not real ({res:.3g})")
            rows.append(
                {
                    "puncture": str(p),
                    "form": i,
                    "re": res.real,
                    "im": res.imag,
                    "flagged": flagged,
                }
            )
    return pd.DataFrame(rows, columns=["puncture", "form", "re", "im", "flagged"])


__all__ = [
    "MeromorphicForm",
    "SurfaceData",
    "combine",
    "form_pole_order",
    "form_residue",
    "local_expansion",
    "residues_real_check",
]
