"""Local charts and the chart decomposition of a truncated domain.

A chart maps a local coordinate ``t`` to ``z`` (with ``dz/dt`` and ``d²z/dt²``)
and, on a curve, to the values of ``w`` it covers. Plane charts on a curve
cover both sheets over the same ``z`` disk; branch and ∞ charts cover a full
neighbourhood of a ramified point once.

The decomposition splits the domain into annuli ``r_in < |t| < r_out`` around
every puncture, branch point and ∞, plus a core ``|z| ≤ R`` minus the disks.
Curvature integration and meshing both work from it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from hsurf.algebra.polynomials import CPoly
from hsurf.surfaces.domains import Domain, puncture_radius
from hsurf.tolerances import INNER_RADIUS, OUTER_RADIUS

logger = logging.getLogger(__name__)


class ChartKind(str, Enum):
    PLANE = "plane"
    SPHERE_INF = "sphere_inf"
    BRANCH = "branch"
    CURVE_INF = "curve_inf"


def _sqrt_near_one(x):
    """Principal square root; callers keep ``x`` near 1 so it is continuous."""
    return np.sqrt(np.asarray(x, dtype=complex))


@dataclass(frozen=True)
class Chart:
    kind: ChartKind
    center: complex
    domain: Domain = field(repr=False)

    # --- Coordinate map ---

    def z(self, t):
        t = np.asarray(t, dtype=complex)
        match self.kind:
            case ChartKind.PLANE:
                return self.center + t
            case ChartKind.SPHERE_INF:
                return 1 / t
            case ChartKind.BRANCH:
                return self.center + t**2
            case ChartKind.CURVE_INF:
                return 1 / t**2

    def dz(self, t):
        t = np.asarray(t, dtype=complex)
        match self.kind:
            case ChartKind.PLANE:
                return np.ones_like(t)
            case ChartKind.SPHERE_INF:
                return -1 / t**2
            case ChartKind.BRANCH:
                return 2 * t
            case ChartKind.CURVE_INF:
                return -2 / t**3

    def d2z(self, t):
        t = np.asarray(t, dtype=complex)
        match self.kind:
            case ChartKind.PLANE:
                return np.zeros_like(t)
            case ChartKind.SPHERE_INF:
                return 2 / t**3
            case ChartKind.BRANCH:
                return 2 * np.ones_like(t)
            case ChartKind.CURVE_INF:
                return 6 / t**4

    # --- Square root ---

    @cached_property
    def _branch_factor(self) -> tuple[CPoly, complex]:
        """``q(s) = p(e+s)/s`` and ``√q(0)`` for branch charts."""
        q = CPoly(self.domain.branch_poly.shift(self.center).coeffs[1:])
        return q, complex(np.sqrt(q(0) + 0j))

    def w_branches(self, t) -> list:
        """Values of ``w`` covered at ``t`` (``[None]`` on the sphere)."""
        if self.domain.is_sphere:
            return [None]
        t = np.asarray(t, dtype=complex)
        p = self.domain.branch_poly
        match self.kind:
            case ChartKind.PLANE:
                w = np.sqrt(p(self.z(t)) + 0j)
                return [w, -w]
            case ChartKind.BRANCH:
                q, s0 = self._branch_factor
                return [t * s0 * _sqrt_near_one(q(t**2) / q(0))]
            case ChartKind.CURVE_INF:
                c = p.lead
                rev = p.reverse(3)
                return [np.sqrt(c) * _sqrt_near_one(rev(t**2) / c) / t**3]
        raise ValueError(f"Chart {self.kind} is not defined on a curve")


@dataclass(frozen=True)
class Annulus:
    """``r_in < |t| < r_out`` in a chart; ``puncture`` marks an end."""

    chart: Chart
    r_in: float
    r_out: float
    puncture: bool


@dataclass(frozen=True)
class Core:
    """``|z| ≤ radius`` minus disks ``|z − c| < r`` (z-plane radii)."""

    radius: float
    holes: tuple[tuple[complex, float], ...]

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        inside = np.abs(z) <= self.radius
        for c, r in self.holes:
            inside &= np.abs(z - c) >= r
        return inside


@dataclass(frozen=True)
class Decomposition:
    domain: Domain
    annuli: tuple[Annulus, ...]
    core: Core

    @property
    def sheets(self) -> int:
        """Number of ``w`` values per core point (1 on the sphere)."""
        return 1 if self.domain.is_sphere else 2


def decompose(
    d: Domain,
    r_in: float = INNER_RADIUS,
    r_out_z: float = OUTER_RADIUS,
    cap: float = 1.0,
) -> Decomposition:
    """Chart decomposition of ``d`` truncated at ``r_in`` around each puncture.

    Parameters
    ----------
    d : Domain
    r_in : float
        Inner radius of every annulus, in the local chart coordinate.
    r_out_z : float
        Truncation of the ∞ chart in ``|z|``; the ∞ annulus runs out to
        ``|z| = r_out_z`` (inner chart radius ``1/r_out_z`` or ``1/√r_out_z``).
    cap : float
        Largest z-radius allowed for a finite disk.
    """
    specials = d.special_points()
    radius = 2.0 * max((abs(z) for z in specials), default=0.0) + 2.0
    finite_punctures = [p.z for p in d.punctures if not p.is_infinity]

    annuli: list[Annulus] = []
    holes: list[tuple[complex, float]] = []
    for c in specials:
        rho = puncture_radius(d, c, cap=cap)
        holes.append((c, rho))
        is_puncture = any(abs(c - q) <= 1e-12 for q in finite_punctures)
        if d.is_ramified(c):
            chart = Chart(ChartKind.BRANCH, c, d)
            annuli.append(Annulus(chart, r_in, float(np.sqrt(rho)), is_puncture))
        else:
            chart = Chart(ChartKind.PLANE, c, d)
            annuli.append(Annulus(chart, r_in, rho, is_puncture))

    inf_puncture = any(p.is_infinity for p in d.punctures)
    if d.is_sphere:
        chart = Chart(ChartKind.SPHERE_INF, 0j, d)
        annuli.append(Annulus(chart, 1.0 / r_out_z, 1.0 / radius, inf_puncture))
    else:
        chart = Chart(ChartKind.CURVE_INF, 0j, d)
        annuli.append(
            Annulus(chart, 1.0 / np.sqrt(r_out_z), 1.0 / np.sqrt(radius), inf_puncture)
        )
    logger.debug(f"Decomposed {d.kind.value} domain: {len(annuli)} annuli, core radius {radius:.3g}")
    return Decomposition(d, tuple(annuli), Core(radius, tuple(holes)))


__all__ = [
    "Annulus",
    "Chart",
    "ChartKind",
    "Core",
    "Decomposition",
    "decompose",
]
