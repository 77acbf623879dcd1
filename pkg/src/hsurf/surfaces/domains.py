"""Domains: the punctured Riemann sphere and genus-1 curves ``w² = p(z)``.

On a curve the square root ``w`` is made single valued by two cuts: a finite
cut joining two roots of ``p`` and a ray from the third root to ∞. ``w_plus``
is the branch continuous off the cuts; points *on* a cut take the limit from
the left of the cut direction (from above, for cuts running left to right).
A :class:`SheetPoint` with ``sheet = ±1`` stands for ``w = sheet · w_plus(z)``.
"""

from __future__ import annotations

import cmath
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from hsurf.algebra.polynomials import CPoly, isolate_roots
from hsurf.algebra.rational import INFINITY, is_infinity
from hsurf.errors import BranchPoint
from hsurf.tolerances import BRANCH_STEP

logger = logging.getLogger(__name__)

# Relative distance used to push on-cut points to the chosen side
_CUT_NUDGE: float = 1e-13

# Relative tolerance for "lies on a cut"
_ON_CUT_TOL: float = 1e-12


class DomainKind(str, Enum):
    SPHERE = "sphere"
    HYPERELLIPTIC = "hyperelliptic"


@dataclass(frozen=True)
class SheetPoint:
    """A point of the domain.

    ``sheet`` is ±1 on a curve, selecting ``w = sheet · w_plus(z)``; it is 0 on
    the sphere and at ramified points of a curve (branch points and ∞).
    """

    z: complex
    sheet: int = 0

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        if self.sheet not in (-1, 0, 1):
            raise ValueError(f"sheet must be -1, 0 or 1, got {self.sheet}")

    @property
    def is_infinity(self) -> bool:
        return is_infinity(self.z)

    def __str__(self) -> str:
        z = "inf" if self.is_infinity else f"{self.z.real:.6g}{self.z.imag:+.6g}i"
        return z if self.sheet == 0 else f"({z}, {self.sheet:+d})"


@dataclass(frozen=True)
class Domain:
    """Punctured sphere or punctured hyperelliptic curve of genus 1.

    Parameters
    ----------
    kind : DomainKind
    punctures : tuple[SheetPoint, ...]
        Removed points. On a curve, branch points and ∞ carry ``sheet = 0``.
    branch_poly : CPoly | None
        Cubic ``p`` with distinct roots (curves only).
    cuts : tuple | None
        ``((e1, e2), (e3, inf))``: the finite cut and the start of the ray cut.
        Defaults to the roots sorted by real part.
    ray_direction : complex
        Unit direction of the ray cut.
    normalization : tuple[complex, complex] | None
        ``(z0, w0)`` fixing the sign of ``w_plus``, e.g. ``(2, sqrt(6))``.
    """

    kind: DomainKind
    punctures: tuple[SheetPoint, ...] = ()
    branch_poly: CPoly | None = None
    cuts: tuple[tuple[complex, complex], tuple[complex, complex]] | None = None
    ray_direction: complex = 1.0
    normalization: tuple[complex, complex] | None = None

    def __post_init__(self):
        if self.kind is DomainKind.SPHERE:
            if self.branch_poly is not None:
                raise ValueError("A sphere domain has no branch polynomial")
            pts = tuple(SheetPoint(p.z, 0) for p in self.punctures)
        else:
            p = self.branch_poly
            if p is None or p.degree != 3:
                raise ValueError(f"Hyperelliptic domains need a cubic, got {p!r}")
            roots = isolate_roots(p)
            if len(roots) != 3:
                raise ValueError(f"Branch polynomial {p!r} has a repeated root")
            if abs(abs(complex(self.ray_direction)) - 1) > 1e-12:
                raise ValueError(f"ray_direction must be a unit vector, got {self.ray_direction}")
            pts = tuple(self._normalise_point(pt) for pt in self.punctures)
        keys = [(round(pt.z.real, 9), round(pt.z.imag, 9), pt.sheet) for pt in pts if not pt.is_infinity]
        if len(set(keys)) != len(keys) or sum(pt.is_infinity for pt in pts) > 1:
            raise ValueError(f"Punctures are not distinct: {[str(p) for p in pts]}")
        object.__setattr__(self, "punctures", pts)

    # --- Construction ---

    @classmethod
    def sphere(cls, punctures: Sequence[complex | SheetPoint] = ()) -> Domain:
        pts = tuple(p if isinstance(p, SheetPoint) else SheetPoint(p) for p in punctures)
        return cls(DomainKind.SPHERE, pts)

    @classmethod
    def hyperelliptic(
        cls,
        branch_poly: CPoly,
        punctures: Sequence[complex | SheetPoint] = (),
        cuts=None,
        ray_direction: complex = 1.0,
        normalization: tuple[complex, complex] | None = None,
    ) -> Domain:
        pts = tuple(p if isinstance(p, SheetPoint) else SheetPoint(p) for p in punctures)
        return cls(
            DomainKind.HYPERELLIPTIC,
            pts,
            branch_poly,
            cuts,
            complex(ray_direction),
            normalization,
        )

    def _normalise_point(self, pt: SheetPoint) -> SheetPoint:
        if self.is_ramified(pt.z):
            return SheetPoint(pt.z, 0)
        if pt.sheet == 0:
            raise ValueError(f"Puncture {pt} at a regular point of the curve needs a sheet")
        return pt

    # --- Structure ---

    @property
    def is_sphere(self) -> bool:
        return self.kind is DomainKind.SPHERE

    @property
    def genus(self) -> int:
        return 0 if self.is_sphere else 1

    @cached_property
    def branch_points(self) -> tuple[complex, ...]:
        """Finite branch points ``(e1, e2, e3)`` in cut order (empty on the sphere)."""
        if self.is_sphere:
            return ()
        roots = [r for r, _ in isolate_roots(self.branch_poly)]
        if self.cuts is None:
            roots.sort(key=lambda r: (r.real, r.imag))
            return tuple(roots)
        (e1, e2), (e3, end) = self.cuts
        if not is_infinity(complex(end)):
            raise ValueError(f"Second cut must run to infinity, got {end}")
        declared = [complex(e1), complex(e2), complex(e3)]
        tol = 1e-8 * (1 + max(abs(r) for r in roots))
        for e in declared:
            if min(abs(e - r) for r in roots) > tol:
                raise ValueError(f"Cut endpoint {e} is not a root of {self.branch_poly!r}")
        return tuple(declared)

    def is_ramified(self, z: complex) -> bool:
        """True at ∞ and at the branch points of a curve."""
        if self.is_sphere:
            return False
        if is_infinity(z):
            return True
        tol = self.branch_poly.root_tol()
        return any(abs(z - e) <= tol for e in self.branch_points)

    def p(self, z):
        """Branch polynomial ``p(z)``."""
        return self.branch_poly(z)

    @cached_property
    def _kappa(self) -> complex:
        if self.normalization is None:
            return 1.0
        z0, w0 = (complex(v) for v in self.normalization)
        raw = complex(self._w_raw(np.array([z0]), 1, kappa=1.0)[0])
        if abs(w0 * w0 - self.p(z0)) > 1e-8 * (1 + abs(w0) ** 2):
            raise ValueError(f"Normalisation w({z0}) = {w0} does not satisfy w² = p(z)")
        return 1.0 if abs(raw - w0) <= abs(raw + w0) else -1.0

    # --- Square root ---

    def _w_raw(self, z: np.ndarray, side: int, kappa: complex) -> np.ndarray:
        e1, e2, e3 = self.branch_points
        d = complex(self.ray_direction)
        c = self.branch_poly.lead
        scale = 1.0 + max(abs(e) for e in self.branch_points)

        u1 = (z - e1) / (e2 - e1)
        on1 = (np.abs(u1.imag) <= _ON_CUT_TOL) & (u1.real >= -_ON_CUT_TOL) & (u1.real <= 1 + _ON_CUT_TOL)
        u3 = (z - e3) / d
        on3 = (np.abs(u3.imag) <= _ON_CUT_TOL * (1 + np.abs(u3))) & (u3.real >= -_ON_CUT_TOL)
        n1 = 1j * (e2 - e1) / abs(e2 - e1)
        n3 = 1j * d
        zq = z + side * _CUT_NUDGE * scale * (on1 * n1 + on3 * n3)

        g1 = (zq - e1) * np.sqrt((zq - e2) / (zq - e1))
        g2 = 1j * np.sqrt(d) * np.sqrt(-(zq - e3) / d)
        raw = kappa * np.sqrt(c) * g1 * g2

        on = on1 | on3
        if np.any(on):
            exact = np.sqrt(self.p(z[on]))
            r = raw[on]
            raw[on] = np.where(np.abs(r - exact) <= np.abs(r + exact), exact, -exact)
        return raw

    def w_plus(self, z, side: int = 1):
        """The cut-continuous branch of ``√p(z)``.

        Parameters
        ----------
        z : complex or array_like
        side : int
            +1 takes limits from the left of each cut's direction on the cut
            itself, -1 from the right.
        """
        if self.is_sphere:
            raise ValueError("w is only defined on hyperelliptic domains")
        arr = np.atleast_1d(np.asarray(z, dtype=complex))
        out = self._w_raw(arr.copy(), side, self._kappa)
        return out.reshape(np.shape(z))[()]

    def sheet_of(self, z, w, side: int = 1):
        """Sheet (±1) of the point ``(z, w)``."""
        wp = self.w_plus(z, side)
        return np.where(np.abs(w - wp) <= np.abs(w + wp), 1, -1)[()]

    def special_points(self) -> list[complex]:
        """Finite punctures and branch points (for path dodging and charts)."""
        pts = [p.z for p in self.punctures if not p.is_infinity]
        for e in self.branch_points:
            if all(abs(e - q) > 1e-12 for q in pts):
                pts.append(e)
        return pts


def w_value(d: Domain, pt: SheetPoint) -> complex:
    """``w`` at a sheet point: ``pt.sheet · w_plus(pt.z)``.

    Raises
    ------
    BranchPoint
        If ``pt.z`` is within τ_root of a root of ``p``.

    Examples
    --------
    >>> d = Domain.hyperelliptic(CPoly([0, -1, 0, 1]), normalization=(2, 6 ** 0.5))
    >>> round(w_value(d, SheetPoint(2, 1)).real, 12)
    2.449489742783
    """
    if d.is_sphere:
        raise ValueError("w_value needs a hyperelliptic domain")
    if is_infinity(pt.z):
        raise ValueError("w is infinite at the point at infinity")
    tol = d.branch_poly.root_tol()
    for e in d.branch_points:
        if abs(pt.z - e) <= tol:
            raise BranchPoint(f"z={pt.z} is within {tol:.1e} of the branch point {e}")
    if pt.sheet not in (1, -1):
        raise ValueError(f"A regular curve point needs sheet ±1, got {pt.sheet}")
    return complex(pt.sheet * d.w_plus(pt.z))


@dataclass(frozen=True)
class BranchTrack:
    """Nodes of a continued branch of ``w`` along a polyline."""

    z: np.ndarray
    w: np.ndarray
    segment: np.ndarray  # index of the polyline segment each node ends

    @property
    def w_end(self) -> complex:
        return complex(self.w[-1])


def branch_nodes(
    d: Domain, path: Sequence[complex], w_start: complex, max_halvings: int = 40
) -> BranchTrack:
    """Continue ``w`` along a polyline by step halving.

    A step is accepted when the new root nearest the previous value differs
    from it by at most ``BRANCH_STEP`` relative; otherwise the step is halved.

    Raises
    ------
    BranchPoint
        If the path runs into a branch point.
    """
    pts = [complex(z) for z in path]
    if len(pts) < 2:
        raise ValueError("A path needs at least two points")
    w_cur = complex(w_start)
    tol = d.branch_poly.root_tol()
    if abs(w_cur * w_cur - d.p(pts[0])) > 1e-8 * (1 + abs(w_cur) ** 2):
        raise ValueError(f"w_start={w_start} is not a square root of p({pts[0]})")

    zs, ws, segs = [pts[0]], [w_cur], [0]
    for k, (z0, z1) in enumerate(zip(pts, pts[1:])):
        if z1 == z0:
            continue
        s, h = 0.0, 1.0
        while s < 1.0:
            h = min(h, 1.0 - s)
            for _ in range(max_halvings):
                z = z0 + (s + h) * (z1 - z0)
                if min(abs(z - e) for e in d.branch_points) <= tol:
                    raise BranchPoint(f"Path passes through a branch point near {z}")
                r = cmath.sqrt(d.p(z))
                cand = r if abs(r - w_cur) <= abs(r + w_cur) else -r
                if abs(cand - w_cur) <= BRANCH_STEP * max(abs(cand), abs(w_cur)):
                    break
                h /= 2
            else:
                raise BranchPoint(f"Branch tracking stalled near z={z}")
            s += h
            w_cur = cand
            zs.append(z)
            ws.append(w_cur)
            segs.append(k)
            h *= 2
    return BranchTrack(np.array(zs), np.array(ws), np.array(segs))


def track_branch(
    d: Domain, path: Sequence[complex], w_start: complex
) -> tuple[complex, int]:
    """Continue ``w`` from ``w_start`` along ``path``.

    Returns
    -------
    tuple[complex, int]
        The value of ``w`` at the end of the path and the sheet it lies on.
    """
    track = branch_nodes(d, path, w_start)
    z_end = complex(track.z[-1])
    sheet = int(d.sheet_of(z_end, track.w_end))
    return track.w_end, sheet


def puncture_radius(d: Domain, p: SheetPoint | complex, cap: float = 1.0) -> float:
    """Radius of a disk about ``p`` free of other special points (z-plane)."""
    z = p.z if isinstance(p, SheetPoint) else complex(p)
    others = [q for q in d.special_points() if abs(q - z) > 1e-12]
    if not others:
        return cap
    return min(cap, 0.4 * min(abs(q - z) for q in others))


__all__ = [
    "INFINITY",
    "BranchTrack",
    "Domain",
    "DomainKind",
    "SheetPoint",
    "branch_nodes",
    "puncture_radius",
    "track_branch",
    "w_value",
]
