"""Numerical total curvature ``∫ K dA`` over a truncated domain.

Each annulus of the chart decomposition is integrated in log-polar
coordinates (Gauss–Legendre in ``log r`` on rings of fixed ratio, trapezoid in
``θ``); the core is triangulated and integrated with a degree-5 rule. On a
curve, plane and core samples add both sheets. Grids are refined by doubling
until successive totals agree.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping

import numpy as np
from scipy.spatial import Delaunay
from scipy.special import roots_legendre

from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.evaluation.metric import curvature_density
from hsurf.surfaces.charts import Annulus, Chart, ChartKind, Core, Decomposition, decompose
from hsurf.surfaces.domains import SheetPoint
from hsurf.surfaces.forms import SurfaceData

logger = logging.getLogger(__name__)

# Degree-5 seven-point rule on the reference triangle (barycentric, weight)
_A1, _B1, _W1 = 0.059715871789770, 0.470142064105115, 0.132394152788506
_A2, _B2, _W2 = 0.797426985353087, 0.101286507323456, 0.125939180544827
_TRI_RULE = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3, 0.225],
        [_A1, _B1, _B1, _W1],
        [_B1, _A1, _B1, _W1],
        [_B1, _B1, _A1, _W1],
        [_A2, _B2, _B2, _W2],
        [_B2, _A2, _B2, _W2],
        [_B2, _B2, _A2, _W2],
    ]
)

# Gauss–Legendre nodes per ring at the coarsest level
_BASE_GL: int = 4

# Core grid points across the diameter at the coarsest level
_BASE_CORE: int = 40

# Inward rings tried per annulus when estimating the excised disk
_MAX_TAIL_RINGS: int = 80


def chart_density(s: SurfaceData, chart: Chart, t, reg_tol: float) -> tuple[np.ndarray, int]:
    """``K dA`` per unit ``t``-area, summed over the sheets the chart covers."""
    t = np.asarray(t, dtype=complex)
    z, dz, d2z = chart.z(t), chart.dz(t), chart.d2z(t)
    total = np.zeros(t.shape)
    n_singular = 0
    for w in chart.w_branches(t):
        phi = s.phi(z, w)
        dphi = s.dphi(z, w)
        phi_t = phi * dz[..., None]
        dphi_t = dphi * (dz**2)[..., None] + phi * d2z[..., None]
        density, singular = curvature_density(phi_t, dphi_t, reg_tol)
        total = total + density
        n_singular += int(singular.sum())
    return total, n_singular


def integrate_annulus(
    s: SurfaceData, a: Annulus, n_theta: int, n_gl: int, ratio: float, reg_tol: float
) -> tuple[float, int]:
    if a.r_out <= a.r_in:
        return 0.0, 0
    u0, u1 = np.log(a.r_in), np.log(a.r_out)
    n_rings = max(1, int(np.ceil((u1 - u0) / np.log(ratio))))
    edges = np.linspace(u0, u1, n_rings + 1)
    x, wx = roots_legendre(n_gl)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wu = (half[:, None] * wx[None, :]).ravel()
    theta = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    r = np.exp(u)
    t = r[:, None] * np.exp(1j * theta)[None, :]
    density, n_singular = chart_density(s, a.chart, t, reg_tol)
    # dA_t = r dr dθ = r² du dθ
    value = float(np.sum(wu * r**2 * density.sum(axis=1)) * (2 * np.pi / n_theta))
    return value, n_singular


def annulus_tail(
    s: SurfaceData, a: Annulus, n_theta: int, n_gl: int, ratio: float, reg_tol: float, target: float
) -> float:
    """``∫ K dA`` over the disk ``|t| < a.r_in`` excised by ``a``.

    Rings of ratio ``ratio`` are added inward until the geometric remainder
    extrapolated from the last two rings drops below ``target``; the remainder
    is then added as well. On the ∞ chart this is the outer radius growing.
    """
    tail, r, prev = 0.0, a.r_in, None
    for _ in range(_MAX_TAIL_RINGS):
        ring, _ = integrate_annulus(s, Annulus(a.chart, r / ratio, r, a.puncture), n_theta, n_gl, ratio, reg_tol)
        tail += ring
        r /= ratio
        if prev is not None:
            rho = abs(ring / prev) if prev else 0.0
            if rho < 1 and abs(ring) * rho / (1 - rho) < target:
                return tail + ring * rho / (1 - rho)
        prev = ring
    logger.warning(f"{s.label}: curvature inside |t| < {a.r_in:.3g} at {a.chart.kind.value} still {prev:.3g} per ring")
    return tail


def core_points(core: Core, n: int, ring_points: int) -> np.ndarray:
    """Grid and boundary-ring points of the core, for triangulation."""
    h = 2 * core.radius / n
    g = np.linspace(-core.radius, core.radius, n + 1)
    zz = (g[None, :] + 1j * g[:, None]).ravel()
    keep = core.contains(zz)
    for c, rho in core.holes:
        keep &= np.abs(zz - c) >= rho + 0.3 * h
    keep &= np.abs(zz) <= core.radius - 0.3 * h
    pts = [zz[keep]]
    phase = np.exp(2j * np.pi * np.arange(ring_points) / ring_points)
    pts.append(core.radius / np.cos(np.pi / ring_points) * phase)
    for c, rho in core.holes:
        m = max(12, int(ring_points * rho / core.radius * 4))
        pts.append(c + rho * np.exp(2j * np.pi * np.arange(m) / m))
    return np.concatenate(pts)


def core_triangles(core: Core, pts: np.ndarray) -> np.ndarray:
    """Delaunay triangles of ``pts`` whose centroids lie in the core."""
    tri = Delaunay(np.column_stack([pts.real, pts.imag]))
    simplices = tri.simplices
    cent = pts[simplices].mean(axis=1)
    keep = np.ones(len(simplices), dtype=bool)
    for c, rho in core.holes:
        keep &= np.abs(cent - c) >= rho
    return simplices[keep]


def integrate_core(
    s: SurfaceData, core: Core, n: int, ring_points: int, reg_tol: float
) -> tuple[float, int]:
    pts = core_points(core, n, ring_points)
    tris = core_triangles(core, pts)
    v = pts[tris]  # (n_tri, 3)
    area = 0.5 * np.abs(
        ((v[:, 1] - v[:, 0]).conj() * (v[:, 2] - v[:, 0])).imag
    )
    nodes = _TRI_RULE[:, :3] @ v.T  # (7, n_tri)
    chart = Chart(ChartKind.PLANE, 0j, s.domain)
    density, n_singular = chart_density(s, chart, nodes, reg_tol)
    value = float(np.sum(_TRI_RULE[:, 3:4] * density * area[None, :]))
    return value, n_singular


def _with_radii(dec: Decomposition, r_in: Mapping[SheetPoint, float]) -> Decomposition:
    annuli = []
    for a in dec.annuli:
        radius = None
        for p, r in r_in.items():
            if (p.is_infinity and a.chart.kind in (ChartKind.SPHERE_INF, ChartKind.CURVE_INF)) or (
                not p.is_infinity and abs(p.z - a.chart.center) <= 1e-12
            ):
                radius = r
        annuli.append(a if radius is None else Annulus(a.chart, radius, a.r_out, a.puncture))
    return Decomposition(dec.domain, tuple(annuli), dec.core)


def integrate_curvature(
    s: SurfaceData,
    r_in: float | Mapping[SheetPoint, float] | None = None,
    density: int | None = None,
    config: NumericsConfig = DEFAULT_CONFIG,
    tail: bool = True,
) -> float:
    """``∫ K dA`` over the domain, with the excised puncture disks estimated.

    Parameters
    ----------
    s : SurfaceData
    r_in : float or mapping, optional
        Inner radius of the puncture annuli in their chart coordinates, either
        one value or per puncture. Defaults to ``config.inner_radius``.
    density : int, optional
        Angular samples per annulus at the coarsest level. Defaults to
        ``config.angular_density``.
    config : NumericsConfig
    tail : bool
        Add the curvature of the disks inside ``r_in`` (see
        :func:`annulus_tail`). Off, the truncated domain alone is integrated.

    Returns
    -------
    float
        The last refinement's total plus the tails. Refinement stops when
        successive totals differ by less than ``curvature_rtol · max(|I|, 2π)``;
        each annulus's tail is extended inward until its extrapolated
        remainder is below that tolerance shared across the annuli.
    """
    base_r = config.inner_radius if r_in is None or isinstance(r_in, Mapping) else float(r_in)
    dec = decompose(s.domain, r_in=base_r, r_out_z=config.outer_radius)
    if isinstance(r_in, Mapping):
        dec = _with_radii(dec, r_in)
    n_theta0 = density or config.angular_density

    previous = None
    value = 0.0
    for level in range(config.max_refinements + 1):
        scale = 2**level
        total, singular = 0.0, 0
        for a in dec.annuli:
            v, n_sing = integrate_annulus(
                s, a, n_theta0 * scale, _BASE_GL * scale, config.annulus_ratio, config.reg_tol
            )
            total += v
            singular += n_sing
        v, n_sing = integrate_core(s, dec.core, _BASE_CORE * scale, n_theta0 * scale, config.reg_tol)
        total += v
        singular += n_sing
        if singular:
            logger.warning(f"{s.label}: {singular} singular samples excluded from ∫K dA")
        logger.debug(f"{s.label}: level {level}, ∫K dA = {total:.8g} ({total / (2 * np.pi):.6f}·2π)")
        value = total
        if previous is not None and abs(total - previous) < config.curvature_rtol * max(abs(total), 2 * np.pi):
            break
        previous = total
    else:
        logger.warning(f"{s.label}: ∫K dA did not settle after {config.max_refinements} refinements")
    if not tail:
        return value

    target = config.curvature_rtol * max(abs(value), 2 * np.pi) / max(len(dec.annuli), 1)
    for a in dec.annuli:
        extra = annulus_tail(
            s, a, n_theta0 * scale, _BASE_GL * scale, config.annulus_ratio, config.reg_tol, target
        )
        logger.debug(f"{s.label}: excised disk at {a.chart.kind.value} {a.chart.center:.3g} adds {extra:.3g}")
        value += extra
    return value


__all__ = [
    "chart_density",
    "core_points",
    "core_triangles",
    "annulus_tail",
    "integrate_annulus",
    "integrate_core",
    "integrate_curvature",
]
