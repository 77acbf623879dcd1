"""First and second fundamental forms and Gaussian curvature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.errors import SingularPoint
from hsurf.evaluation.evaluate import normal_from_phi
from hsurf.surfaces.domains import SheetPoint, w_value
from hsurf.surfaces.forms import SurfaceData


@dataclass(frozen=True)
class MetricSample:
    E: float
    F: float
    G: float
    L: float
    M: float
    N: float
    K: float
    dA: float


def metric_from_phi(phi, dphi, reg_tol: float = DEFAULT_CONFIG.reg_tol) -> MetricSample:
    """Metric data from ``φ`` and ``φ'`` at one point.

    Raises
    ------
    SingularPoint
        If ``|f_x × f_y| ≤ reg_tol · |φ|²``.
    """
    phi = np.asarray(phi, dtype=complex)
    dphi = np.asarray(dphi, dtype=complex)
    fx, fy = phi.real, -phi.imag
    fxx, fxy, fyy = dphi.real, -dphi.imag, -dphi.real
    n = normal_from_phi(phi)
    norm = float(np.linalg.norm(n))
    scale = float(np.sum(np.abs(phi) ** 2))
    if norm <= reg_tol * scale:
        raise SingularPoint(f"|f_x × f_y| = {norm:.3e} is below {reg_tol:g}·|φ|²")
    unit = n / norm
    E, F, G = fx @ fx, fx @ fy, fy @ fy
    L, M, N = fxx @ unit, fxy @ unit, fyy @ unit
    K = (L * N - M * M) / (E * G - F * F)
    return MetricSample(float(E), float(F), float(G), float(L), float(M), float(N), float(K), norm)


def metric_sample(
    s: SurfaceData, pt: SheetPoint | complex, config: NumericsConfig = DEFAULT_CONFIG
) -> MetricSample:
    """Fundamental forms and curvature at ``pt``.

    Examples
    --------
    >>> from hsurf.algebra import parse_forms
    >>> from hsurf.surfaces import Domain, MeromorphicForm
    >>> s = SurfaceData(Domain.sphere(["inf"]), [MeromorphicForm.from_wexpr(e) for e in parse_forms("1, i, z")])
    >>> metric_sample(s, 0).K
    -1.0
    """
    pt = pt if isinstance(pt, SheetPoint) else SheetPoint(pt, 0 if s.domain.is_sphere else 1)
    w = None if s.domain.is_sphere else w_value(s.domain, pt)
    return metric_from_phi(s.phi(pt.z, w), s.dphi(pt.z, w), config.reg_tol)


def curvature_density(phi, dphi, reg_tol: float = DEFAULT_CONFIG.reg_tol) -> tuple[np.ndarray, np.ndarray]:
    """``K dA`` per unit coordinate area, vectorised over leading axes.

    ``K dA = −|φ'·n|² / |n|³`` with ``n = f_x × f_y``. Each point is first
    scaled by ``1/|φ|``, under which the density is invariant.

    Returns
    -------
    tuple of ndarray
        The density (0 at singular samples) and a mask of singular samples.
    """
    phi = np.asarray(phi, dtype=complex)
    dphi = np.asarray(dphi, dtype=complex)
    scale = np.sqrt(np.sum(np.abs(phi) ** 2, axis=-1))
    safe = np.where(scale > 0, scale, 1.0)[..., None]
    phi = phi / safe
    dphi = dphi / safe
    n = normal_from_phi(phi)
    norm = np.linalg.norm(n, axis=-1)
    singular = norm <= reg_tol
    proj = np.sum(dphi * n, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        density = -(np.abs(proj) ** 2) / norm**3
    density = np.where(singular | ~np.isfinite(density), 0.0, density)
    return density, singular


__all__ = [
    "MetricSample",
    "curvature_density",
    "metric_from_phi",
    "metric_sample",
]
