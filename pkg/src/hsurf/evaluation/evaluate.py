"""Evaluation of ``f = Re ∫ Ω`` and its first and second derivatives.

On the sphere ``f`` is the real part of closed-form antiderivatives. On a
curve the ``dz`` parts still integrate in closed form; the ``dz/w`` parts are
integrated along dodged paths from the basepoint with the sheet continued by
branch tracking. A path that lands on the wrong sheet is reflected with the
involution identity ``f_B(z, −w) = c − f_B(z, w)``, ``c = 2 f_B(e)`` for a
branch point ``e``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.errors import PathThroughPole
from hsurf.periods.cycles import _half_integral
from hsurf.periods.quadrature import PathIntegrator
from hsurf.surfaces.domains import SheetPoint, w_value
from hsurf.surfaces.forms import SurfaceData

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Jet:
    """``f`` with ``φ`` and ``φ'`` at a point (``ω_k = φ_k dz``).

    ``f_x = Re φ``, ``f_y = −Im φ``, ``f_xx = Re φ'``, ``f_xy = −Im φ'`` and
    ``f_yy = −Re φ'``.
    """

    f: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray

    @property
    def fx(self) -> np.ndarray:
        return self.phi.real

    @property
    def fy(self) -> np.ndarray:
        return -self.phi.imag

    @property
    def fxx(self) -> np.ndarray:
        return self.dphi.real

    @property
    def fxy(self) -> np.ndarray:
        return -self.dphi.imag

    @property
    def fyy(self) -> np.ndarray:
        return -self.dphi.real

    @property
    def normal(self) -> np.ndarray:
        return normal_from_phi(self.phi)


def normal_from_phi(phi) -> np.ndarray:
    """``f_x × f_y = Im(φ2 φ̄3, −φ1 φ̄3, φ1 φ̄2)``, stacked on the last axis."""
    phi = np.asarray(phi, dtype=complex)
    p1, p2, p3 = phi[..., 0], phi[..., 1], phi[..., 2]
    return np.stack(
        [
            (p2 * np.conj(p3)).imag,
            -(p1 * np.conj(p3)).imag,
            (p1 * np.conj(p2)).imag,
        ],
        axis=-1,
    )


def default_basepoint(s: SurfaceData) -> SheetPoint:
    """Regular point off the real axis, away from every special point."""
    d = s.domain
    specials = d.special_points()
    if not specials:
        return SheetPoint(0.5 + 0.5j, 0 if d.is_sphere else 1)
    center = np.mean(specials)
    spread = max(abs(z - center) for z in specials)
    z = complex(center + (0.31 + 0.47j) * (1.0 + spread))
    return SheetPoint(z, 0 if d.is_sphere else 1)


class Evaluator:
    """Evaluates one surface; caches the basepoint data and branch constants."""

    def __init__(self, s: SurfaceData, config: NumericsConfig = DEFAULT_CONFIG):
        self.surface = s
        self.domain = s.domain
        self.config = config
        self.basepoint = s.basepoint
        if not self.domain.is_sphere and self.basepoint is None:
            self.basepoint = default_basepoint(s)

    def __repr__(self) -> str:
        return f"Evaluator({self.surface!r})"

    # --- dz parts ---

    def f_a(self, z) -> np.ndarray:
        """``Re`` of the closed-form antiderivatives, stacked on the last axis."""
        out = np.stack([F.real_part(z) for F in self.surface.antiderivatives], axis=-1)
        return out

    @cached_property
    def _offset(self) -> np.ndarray:
        if self.basepoint is None:
            return np.zeros(3)
        return self.f_a(self.basepoint.z)

    # --- dz/w parts ---

    @cached_property
    def integrator(self) -> PathIntegrator:
        poles = []
        for f in self.surface.omega:
            poles += [p for p, _ in f.a.poles] + [p for p, _ in f.b.poles]
        return PathIntegrator(self.domain, poles, self.config)

    def _g_b(self, z, w) -> np.ndarray:
        return np.array([f.b(z) / w for f in self.surface.omega])

    @cached_property
    def _w_base(self) -> complex:
        return w_value(self.domain, self.basepoint)

    def _f_b_reached(self, z: complex) -> tuple[np.ndarray, complex]:
        value, w_end = self.integrator.route(self._g_b, self.basepoint.z, self._w_base, z)
        return np.real(value), w_end

    def _f_b_branch(self, e: complex) -> np.ndarray:
        """``f_B`` at the branch point ``e``."""
        r = self.integrator.clearance(e) * 0.5
        direction = (self.basepoint.z - e) / abs(self.basepoint.z - e)
        q = e + r * direction
        fq, wq = self._f_b_reached(q)
        inner = np.array(
            [
                _half_integral(self.domain, f, e, q, wq, False, self.config)[0]
                if f.has_w
                else 0j
                for f in self.surface.omega
            ]
        )
        return fq - np.real(inner)

    @cached_property
    def involution_constant(self) -> np.ndarray:
        """``c = 2 f_B(e)`` at the first branch point."""
        return 2 * self._f_b_branch(self.domain.branch_points[0])

    def f_b(self, pt: SheetPoint) -> np.ndarray:
        d = self.domain
        if not any(f.has_w for f in self.surface.omega):
            return np.zeros(3)
        if d.is_ramified(pt.z):
            return self._f_b_branch(pt.z)
        value, w_end = self._f_b_reached(pt.z)
        if int(d.sheet_of(pt.z, w_end)) != pt.sheet:
            value = self.involution_constant - value
        return value

    # --- Public ---

    def _check_point(self, pt: SheetPoint) -> None:
        if pt.is_infinity:
            raise PathThroughPole("f is not defined at ∞ when ∞ is an end")
        for q in self.domain.punctures:
            if not q.is_infinity and abs(q.z - pt.z) <= 1e-12 and (q.sheet in (0, pt.sheet)):
                raise PathThroughPole(f"{pt} is a puncture")

    def __call__(self, pt: SheetPoint | complex) -> np.ndarray:
        pt = pt if isinstance(pt, SheetPoint) else SheetPoint(pt, 0 if self.domain.is_sphere else 1)
        self._check_point(pt)
        out = np.asarray(self.f_a(pt.z), dtype=float) - self._offset
        if not self.domain.is_sphere:
            out = out + self.f_b(pt)
        return out

    def jet(self, pt: SheetPoint | complex) -> Jet:
        pt = pt if isinstance(pt, SheetPoint) else SheetPoint(pt, 0 if self.domain.is_sphere else 1)
        w = None if self.domain.is_sphere else w_value(self.domain, pt)
        return Jet(self(pt), self.surface.phi(pt.z, w), self.surface.dphi(pt.z, w))


def evaluate(s: SurfaceData, pt: SheetPoint | complex, config: NumericsConfig = DEFAULT_CONFIG) -> np.ndarray:
    """``f(pt) = Re ∫_{basepoint}^{pt} Ω``.

    Examples
    --------
    >>> from hsurf.algebra import parse_forms
    >>> from hsurf.surfaces import Domain, MeromorphicForm
    >>> s = SurfaceData(Domain.sphere(["inf"]), [MeromorphicForm.from_wexpr(e) for e in parse_forms("1, i, z")])
    >>> evaluate(s, 2 + 1j).round(12).tolist()
    [2.0, -1.0, 1.5]
    """
    return Evaluator(s, config)(pt)


def evaluate_many(
    s: SurfaceData,
    z: Sequence[complex] | np.ndarray,
    sheets: Sequence[int] | np.ndarray | None = None,
    config: NumericsConfig = DEFAULT_CONFIG,
    evaluator: Evaluator | None = None,
) -> np.ndarray:
    """Vectorised :func:`evaluate`; returns an array of shape ``(len(z), 3)``."""
    z = np.asarray(z, dtype=complex).ravel()
    ev = evaluator or Evaluator(s, config)
    if s.domain.is_sphere:
        return np.atleast_2d(ev.f_a(z) - ev._offset).reshape(len(z), 3)
    sheets = np.ones(len(z), dtype=int) if sheets is None else np.asarray(sheets, dtype=int)
    return np.array([ev(SheetPoint(zi, int(si))) for zi, si in zip(z, sheets, strict=True)]).reshape(len(z), 3)


def jet(s: SurfaceData, pt: SheetPoint | complex, config: NumericsConfig = DEFAULT_CONFIG) -> Jet:
    return Evaluator(s, config).jet(pt)


def normal(s: SurfaceData, pt: SheetPoint | complex) -> np.ndarray:
    """``f_x × f_y`` at ``pt`` (unnormalised)."""
    pt = pt if isinstance(pt, SheetPoint) else SheetPoint(pt, 0 if s.domain.is_sphere else 1)
    w = None if s.domain.is_sphere else w_value(s.domain, pt)
    return normal_from_phi(s.phi(pt.z, w))


__all__ = [
    "Evaluator",
    "Jet",
    "default_basepoint",
    "evaluate",
    "evaluate_many",
    "jet",
    "normal",
    "normal_from_phi",
]
