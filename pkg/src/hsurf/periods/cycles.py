"""Cycles on the domain and the integrals of forms around them."""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from hsurf.algebra.calculus import residue
from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.periods.quadrature import PathIntegrator, quad_complex
from hsurf.surfaces.domains import Domain, SheetPoint, w_value
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData, form_residue

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PunctureLoop:
    """Small positively oriented loop around a puncture."""

    point: SheetPoint
    orientation: int = 1

    def __str__(self) -> str:
        return f"loop({self.point})"


@dataclass(frozen=True)
class CollapsedInterval:
    """Cycle shrunk onto the segment ``[a, b]`` between two branch points.

    With ``both_sheets`` the cycle runs out along one side of the segment and
    back on the other sheet, so the ``dz/w`` part doubles. ``side`` picks the
    limit of ``w_plus`` used on the segment.
    """

    a: complex
    b: complex
    both_sheets: bool = True
    side: int = 1
    orientation: int = 1

    def __str__(self) -> str:
        return f"interval({self.a:g}, {self.b:g})"


@dataclass(frozen=True)
class ExplicitPath:
    """Closed polyline; the first point fixes the starting sheet."""

    points: tuple[SheetPoint, ...]
    orientation: int = 1

    def __post_init__(self):
        pts = tuple(self.points)
        if len(pts) < 3:
            raise ValueError("A closed path needs at least three points")
        if abs(pts[0].z - pts[-1].z) > 1e-12:
            raise ValueError(f"Path does not return to its start: {pts[0]} -> {pts[-1]}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def circle(cls, center: complex, radius: float, start_sheet: int = 0, n: int = 64) -> ExplicitPath:
        """Counter-clockwise polygon with ``n`` sides about ``center``."""
        angles = 2 * np.pi * np.arange(n + 1) / n
        zs = center + radius * np.exp(1j * angles)
        zs[-1] = zs[0]
        return cls(tuple(SheetPoint(complex(z), start_sheet if k == 0 else 0) for k, z in enumerate(zs)))

    def __str__(self) -> str:
        return f"path({len(self.points)} points from {self.points[0]})"


Cycle = Union[PunctureLoop, CollapsedInterval, ExplicitPath]


# ---------------------------------------------------------------------------
# Segment integrals with square-root endpoints
# ---------------------------------------------------------------------------


def _rotated_sqrt(values, alpha: float):
    """Square root with its cut rotated to the ray opposite ``e^{iα}``."""
    return cmath.exp(0.5j * alpha) * np.sqrt(np.asarray(values, dtype=complex) * cmath.exp(-1j * alpha))


def _half_integral(
    d: Domain,
    f: MeromorphicForm,
    e: complex,
    m: complex,
    w_ref: complex,
    a_part: bool,
    config: NumericsConfig,
) -> np.ndarray:
    """``∫_e^m (a + b/w) dx`` with ``w(m) = w_ref``, substituting ``x = e + (m−e)s²``
    when ``e`` is a branch point."""
    p = d.branch_poly
    ramified = d.is_ramified(e)
    if ramified:
        others = [r for r in d.branch_points if abs(r - e) > 1e-12]
        c = p.lead

        def h(x):
            return c * (x - others[0]) * (x - others[1])

        alpha = cmath.phase(h(m))
        root_m = cmath.sqrt(m - e)
        w_m = root_m * complex(_rotated_sqrt(h(m), alpha))
        sigma = 1.0 if abs(w_m - w_ref) <= abs(w_m + w_ref) else -1.0

        def fn(s):
            x = e + (m - e) * s * s
            out = 0j
            if f.has_w:
                out = out + 2 * sigma * root_m * f.b(x) / _rotated_sqrt(h(x), alpha)
            if a_part and not f.a.is_zero:
                out = out + f.a(x) * 2 * (m - e) * s
            return out

    else:
        alpha = cmath.phase(p(m))
        w_m = complex(_rotated_sqrt(p(m), alpha))
        sigma = 1.0 if abs(w_m - w_ref) <= abs(w_m + w_ref) else -1.0

        def fn(s):
            x = e + (m - e) * s
            out = 0j
            if f.has_w:
                out = out + f.b(x) / (sigma * _rotated_sqrt(p(x), alpha))
            if a_part and not f.a.is_zero:
                out = out + f.a(x)
            return out * (m - e)

    return quad_complex(fn, 0.0, 1.0, config)


def _interval_integral(
    d: Domain, f: MeromorphicForm, c: CollapsedInterval, config: NumericsConfig
) -> complex:
    a, b = complex(c.a), complex(c.b)
    m = 0.5 * (a + b)
    w_ref = complex(d.w_plus(m, c.side))
    if c.both_sheets:
        # the dz part only picks up residues of the poles the loop encloses
        inner = _half_integral(d, f, a, m, w_ref, False, config) - _half_integral(d, f, b, m, w_ref, False, config)
        value = 2 * complex(inner[0])
        for pole, _ in f.a.poles:
            if _on_segment(pole, a, b):
                value += 2j * np.pi * residue(f.a, pole)
        return value
    one = _half_integral(d, f, a, m, w_ref, True, config) - _half_integral(d, f, b, m, w_ref, True, config)
    return complex(one[0])


def _on_segment(z: complex, a: complex, b: complex, tol: float = 1e-10) -> bool:
    u = (z - a) / (b - a)
    return abs(u.imag) <= tol and -tol <= u.real <= 1 + tol


# ---------------------------------------------------------------------------
# Cycle integrals
# ---------------------------------------------------------------------------


def form_cycle_integral(
    d: Domain, f: MeromorphicForm, c: Cycle, config: NumericsConfig = DEFAULT_CONFIG
) -> complex:
    """``∮_c f``."""
    if f.is_zero:
        return 0j
    match c:
        case PunctureLoop(point=pt):
            value = 2j * np.pi * form_residue(f, d, pt)
        case CollapsedInterval():
            if d.is_sphere:
                raise ValueError("Collapsed intervals need a hyperelliptic domain")
            value = _interval_integral(d, f, c, config)
        case ExplicitPath(points=pts):
            value = _path_integral(d, f, pts, config)
        case _:
            raise TypeError(f"Unknown cycle {c!r}")
    return c.orientation * value


def _path_integral(d: Domain, f: MeromorphicForm, pts, config: NumericsConfig) -> complex:
    integrator = PathIntegrator(d, [pole for pole, _ in f.a.poles] + [pole for pole, _ in f.b.poles], config)
    zs = [p.z for p in pts]
    if d.is_sphere:
        value, _ = integrator.integrate(lambda z, w: f(z), zs)
        return complex(np.asarray(value).ravel()[0])
    w0 = w_value(d, pts[0])
    value, w_end = integrator.integrate(lambda z, w: f(z, w), zs, w0)
    if abs(w_end - w0) > 1e-6 * (1 + abs(w0)):
        raise ValueError(f"Path from {pts[0]} ends on the other sheet; it is not closed on the curve")
    return complex(np.asarray(value).ravel()[0])


def homology_basis(d: Domain) -> list[CollapsedInterval]:
    """Two collapsed intervals between branch points spanning the homology of a curve.

    The intervals ``[e1, e2]`` and ``[e2, e3]`` run over the finite cut and
    across to the ray; ``[e1, e3]`` stands in for one whose end is a
    puncture. Empty on the sphere.
    """
    if d.is_sphere:
        return []
    e1, e2, e3 = d.branch_points
    tol = 1e-8 * (1 + max(abs(e1), abs(e2), abs(e3)))
    pinned = [p.z for p in d.punctures if not p.is_infinity]

    def free(e: complex) -> bool:
        return all(abs(e - q) > tol for q in pinned)

    basis = [CollapsedInterval(a, b) for a, b in ((e1, e2), (e2, e3), (e1, e3)) if free(a) and free(b)][:2]
    if len(basis) < 2:
        logger.warning(f"Punctures sit on branch points; only {len(basis)} interval cycle(s) avoid them")
    return basis


def cycle_integral(
    s: SurfaceData, i: int, c: Cycle, config: NumericsConfig = DEFAULT_CONFIG
) -> complex:
    """``∮_c ω_i`` for the 1-based form index ``i``."""
    if i not in (1, 2, 3):
        raise ValueError(f"Form index must be 1, 2 or 3, got {i}")
    return form_cycle_integral(s.domain, s.omega[i - 1], c, config)


def real_period(
    s: SurfaceData, i: int, c: Cycle, config: NumericsConfig = DEFAULT_CONFIG
) -> float:
    """``Re ∮_c ω_i``; zero for every cycle exactly when ``f`` is single valued.

    Examples
    --------
    >>> from hsurf.algebra import parse_forms
    >>> from hsurf.surfaces import Domain, MeromorphicForm, SurfaceData, SheetPoint
    >>> d = Domain.sphere([0])
    >>> s = SurfaceData(d, [MeromorphicForm.from_wexpr(e) for e in parse_forms("1, i, 1/z")])
    >>> abs(real_period(s, 3, PunctureLoop(SheetPoint(0)))) < 1e-12
    True
    """
    return cycle_integral(s, i, c, config).real


__all__ = [
    "CollapsedInterval",
    "Cycle",
    "ExplicitPath",
    "PunctureLoop",
    "cycle_integral",
    "form_cycle_integral",
    "homology_basis",
    "real_period",
]
