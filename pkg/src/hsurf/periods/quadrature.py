"""Adaptive quadrature of forms along segments and polylines.

Integrands are vector valued and complex; they are split into real and
imaginary halves for ``scipy.integrate.quad_vec`` (Gauss–Kronrod 15).
Along paths on a curve, ``w`` is continued by :func:`branch_nodes` and
re-evaluated inside the integrand as the root nearest the interpolated
tracked value.
"""

from __future__ import annotations

import cmath
import logging
from collections.abc import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.errors import BranchPoint, PathThroughPole, QuadratureNonConvergence
from hsurf.surfaces.domains import Domain, branch_nodes

logger = logging.getLogger(__name__)

# (z, w) -> complex array
Integrand = Callable[[complex, complex | None], np.ndarray]

# Vertices of the polygon used to loop around a branch point
_LOOP_VERTICES: int = 12

# Largest number of detours inserted by one dodge
_MAX_DODGES: int = 64


def quad_complex(
    fn: Callable[[float], np.ndarray],
    a: float = 0.0,
    b: float = 1.0,
    config: NumericsConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Integrate a complex vector function of a real variable over ``[a, b]``.

    Raises
    ------
    QuadratureNonConvergence
        If the subinterval limit is reached before the tolerance is met.
    """

    def split(x):
        v = np.atleast_1d(np.asarray(fn(x), dtype=complex))
        return np.concatenate([v.real, v.imag])

    res, err, info = quad_vec(
        split,
        a,
        b,
        epsabs=config.quad_epsabs,
        epsrel=config.quad_epsrel,
        limit=config.quad_limit,
        quadrature="gk15",
        norm="max",
        full_output=True,
    )
    if info.status == 1:
        raise QuadratureNonConvergence(
            f"Quadrature did not converge after {info.intervals.shape[0]} subintervals "
            f"(error estimate {err:.3e})"
        )
    if info.status == 2:
        logger.debug(f"Quadrature round-off limited (error estimate {err:.3e})")
    n = res.size // 2
    return res[:n] + 1j * res[n:]


def quad_segment(
    fn: Callable[[complex], np.ndarray],
    z0: complex,
    z1: complex,
    config: NumericsConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """``∫ fn(z) dz`` along the straight segment from ``z0`` to ``z1``."""
    dz = complex(z1) - complex(z0)
    return quad_complex(lambda s: np.asarray(fn(z0 + s * dz)) * dz, 0.0, 1.0, config)


def _nearest_root(p_val: complex, guess: complex) -> complex:
    r = cmath.sqrt(p_val)
    return r if abs(r - guess) <= abs(r + guess) else -r


class PathIntegrator:
    """Integrates ``g(z, w) dz`` along polylines on a domain.

    Parameters
    ----------
    domain : Domain
    obstacles : sequence of complex
        Extra points paths must avoid (e.g. poles of the integrand), in
        addition to the domain's punctures and branch points.
    config : NumericsConfig
    """

    def __init__(
        self,
        domain: Domain,
        obstacles: Sequence[complex] = (),
        config: NumericsConfig = DEFAULT_CONFIG,
    ):
        self.domain = domain
        self.config = config
        pts = list(domain.special_points())
        for c in obstacles:
            if all(abs(c - q) > 1e-12 for q in pts):
                pts.append(complex(c))
        self.obstacles = pts

    def __repr__(self) -> str:
        return f"PathIntegrator({self.domain.kind.value}, {len(self.obstacles)} obstacles)"

    # --- Paths ---

    def clearance(self, c: complex) -> float:
        others = [q for q in self.obstacles if abs(q - c) > 1e-12]
        near = min((abs(q - c) for q in others), default=2.0)
        return max(self.config.dodge_tol, 0.25 * min(near, 2.0))

    def dodge(self, z0: complex, z1: complex) -> list[complex]:
        """Polyline from ``z0`` to ``z1`` keeping clear of the obstacles.

        Each obstacle closer to a segment than its clearance radius is passed
        on a rectangular detour. Obstacles at the endpoints are not dodged.

        Raises
        ------
        PathThroughPole
            If no clear route is found.
        """
        path = [complex(z0), complex(z1)]
        for _ in range(_MAX_DODGES):
            hit = self._first_hit(path)
            if hit is None:
                return path
            k, c, r = hit
            a, b = path[k], path[k + 1]
            u = (b - a) / abs(b - a)
            n = 1j * u
            side = 1.0 if ((c - a) / u).imag <= 0 else -1.0
            detour = [c - r * u + side * r * n, c + r * u + side * r * n]
            path[k + 1 : k + 1] = detour
        raise PathThroughPole(f"Could not route a path from {z0} to {z1} around the obstacles")

    def _first_hit(self, path: list[complex]):
        ends = (path[0], path[-1])
        for k, (a, b) in enumerate(zip(path, path[1:])):
            if a == b:
                continue
            u = (b - a) / abs(b - a)
            for c in self.obstacles:
                if min(abs(c - e) for e in ends) <= 1e-12:
                    continue
                r = self.clearance(c)
                s = ((c - a) / u).real
                if s <= 0 or s >= abs(b - a):
                    dist = min(abs(c - a), abs(c - b))
                else:
                    dist = abs(((c - a) / u).imag)
                if dist < 0.5 * r:
                    return k, c, r
        return None

    def loop_around(self, e: complex, start: complex) -> list[complex]:
        """Closed polygon around ``e`` through ``start`` (counter-clockwise)."""
        r = abs(start - e)
        theta0 = cmath.phase(start - e)
        angles = theta0 + 2 * np.pi * np.arange(1, _LOOP_VERTICES + 1) / _LOOP_VERTICES
        return [complex(start)] + [complex(e + r * np.exp(1j * t)) for t in angles]

    # --- Integration ---

    def integrate(
        self,
        g: Integrand,
        path: Sequence[complex],
        w_start: complex | None = None,
    ) -> tuple[np.ndarray, complex | None]:
        """``∫ g(z, w) dz`` along ``path``, continuing ``w`` from ``w_start``.

        Returns
        -------
        tuple
            The integral and the value of ``w`` at the end of the path
            (None on the sphere).
        """
        pts = [complex(z) for z in path]
        if self.domain.is_sphere:
            total = 0j
            for z0, z1 in zip(pts, pts[1:]):
                if z0 != z1:
                    total = total + quad_segment(lambda z: g(z, None), z0, z1, self.config)
            return np.asarray(total), None

        if w_start is None:
            raise ValueError("w_start is required on a curve")
        track = branch_nodes(self.domain, pts, w_start)
        p = self.domain.p
        total = 0j
        for k, (z0, z1) in enumerate(zip(pts, pts[1:])):
            if z0 == z1:
                continue
            # nodes ending steps on this segment; the node before them starts it
            idx = np.flatnonzero(track.segment[1:] == k) + 1
            if not idx.size:
                continue
            start = idx[0] - 1
            zs = track.z[start : idx[-1] + 1]
            ws = track.w[start : idx[-1] + 1]
            svals = np.real((zs - z0) / (z1 - z0))
            dz = z1 - z0

            def fn(s, ws=ws, svals=svals, z0=z0, dz=dz):
                guess = np.interp(s, svals, ws.real) + 1j * np.interp(s, svals, ws.imag)
                z = z0 + s * dz
                return np.asarray(g(z, _nearest_root(p(z), guess))) * dz

            total = total + quad_complex(fn, 0.0, 1.0, self.config)
        return np.asarray(total), track.w_end

    def route(
        self,
        g: Integrand,
        z0: complex,
        w0: complex | None,
        z1: complex,
        sheet: int = 0,
    ) -> tuple[np.ndarray, complex | None]:
        """Integrate from ``(z0, w0)`` to ``z1`` ending on ``sheet``.

        ``sheet = 0`` accepts whichever sheet the dodged path reaches. When the
        path lands on the wrong sheet, a loop around a branch point is
        inserted.

        Raises
        ------
        BranchPoint
            If no route reaches the requested sheet.
        """
        path = self.dodge(z0, z1)
        value, w_end = self.integrate(g, path, w0)
        if self.domain.is_sphere or sheet == 0:
            return value, w_end
        if int(self.domain.sheet_of(z1, w_end)) == sheet:
            return value, w_end
        for e in sorted(self.domain.branch_points, key=lambda b: abs(b - z1)):
            q = e + self.clearance(e) * ((z1 - e) / abs(z1 - e) if z1 != e else 1.0)
            detour = self.dodge(z0, q) + self.loop_around(e, q)[1:] + self.dodge(q, z1)[1:]
            try:
                value, w_end = self.integrate(g, detour, w0)
            except BranchPoint:
                continue
            if int(self.domain.sheet_of(z1, w_end)) == sheet:
                logger.debug(f"Routed to sheet {sheet:+d} by looping around {e}")
                return value, w_end
        raise BranchPoint(f"No route from {z0} reaches sheet {sheet:+d} over {z1}")


__all__ = [
    "Integrand",
    "PathIntegrator",
    "quad_complex",
    "quad_segment",
]
