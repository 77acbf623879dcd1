"""Regularity, self-intersection and injectivity scans.

Every scan returns a list of :class:`~hsurf.verification.witnesses.Witness`
that re-verify on the surface: candidates found on samples or meshes are
refined locally and only kept when the refined residual is within tolerance.
An empty list is evidence at the scanned resolution, not a proof.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import least_squares, minimize
from scipy.spatial import cKDTree

from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.errors import HarmonicSurfaceError
from hsurf.evaluation.evaluate import Evaluator, normal_from_phi
from hsurf.surfaces.domains import SheetPoint
from hsurf.surfaces.forms import SurfaceData
from hsurf.tolerances import WITNESS_TOL
from hsurf.verification.bvh import intersecting_pairs
from hsurf.verification.mesh import (
    Region,
    TriMesh,
    _nearest_roots,
    build_mesh,
    curve_parameter_mesh,
    sphere_parameter_mesh,
)
from hsurf.verification.witnesses import Witness, WitnessKind, sort_witnesses

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def chordal_distance(z1, z2) -> np.ndarray:
    """Distance on the Riemann sphere (at most 2)."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    return 2 * np.abs(z1 - z2) / np.sqrt((1 + np.abs(z1) ** 2) * (1 + np.abs(z2) ** 2))


def parameter_distance(s: SurfaceData, z1, sheet1, z2, sheet2) -> np.ndarray:
    """Chordal distance in ``z`` plus, on a curve, the relative gap in ``w``."""
    dist = chordal_distance(z1, z2)
    d = s.domain
    if d.is_sphere:
        return dist
    s1 = np.where(np.asarray(sheet1) == 0, 1, sheet1)
    s2 = np.where(np.asarray(sheet2) == 0, 1, sheet2)
    w1 = s1 * d.w_plus(np.asarray(z1, dtype=complex))
    w2 = s2 * d.w_plus(np.asarray(z2, dtype=complex))
    return dist + np.abs(w1 - w2) / (1 + np.abs(w1) + np.abs(w2))


def _values(ev: Evaluator, z: complex, sheet: int) -> np.ndarray | None:
    if not ev.domain.is_sphere and sheet == 0:
        sheet = 1
    try:
        return ev(SheetPoint(z, sheet))
    except HarmonicSurfaceError:
        return None


def _refine_pair(
    ev: Evaluator, p1: SheetPoint, p2: SheetPoint, radius: float
) -> tuple[SheetPoint, SheetPoint, float] | None:
    """Minimise ``|f(q1) − f(q2)|`` with each ``q`` within ``radius`` of its start."""
    x0 = np.array([p1.z.real, p1.z.imag, p2.z.real, p2.z.imag])
    failed = np.full(3, 1e6)

    def residual(x):
        a = _values(ev, complex(x[0], x[1]), p1.sheet)
        b = _values(ev, complex(x[2], x[3]), p2.sheet)
        if a is None or b is None:
            return failed
        return a - b

    lo, hi = x0 - radius, x0 + radius
    try:
        sol = least_squares(residual, x0, bounds=(lo, hi), xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=200)
    except (ValueError, HarmonicSurfaceError) as exc:
        logger.debug(f"Pair refinement from {p1}, {p2} failed: {exc}")
        return None
    q1 = SheetPoint(complex(sol.x[0], sol.x[1]), p1.sheet)
    q2 = SheetPoint(complex(sol.x[2], sol.x[3]), p2.sheet)
    return q1, q2, float(np.linalg.norm(sol.fun))


def _dedupe(points: Sequence[tuple[complex, ...]], radius: float, limit: int | None = None) -> list[int]:
    """Indices of a greedy subset whose parameter tuples are ``radius`` apart."""
    kept: list[int] = []
    for i, p in enumerate(points):
        if limit is not None and len(kept) >= limit:
            break
        if all(max(abs(a - b) for a, b in zip(p, points[k], strict=True)) > radius for k in kept):
            kept.append(i)
    return kept


# ---------------------------------------------------------------------------
# Regularity
# ---------------------------------------------------------------------------


def _nu(phi: np.ndarray) -> np.ndarray:
    scale = np.sum(np.abs(phi) ** 2, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        nu = np.linalg.norm(normal_from_phi(phi), axis=-1) / scale
    return np.where(np.isfinite(nu), nu, np.inf)


def _sample_points(s: SurfaceData, region: Region, grid: int):
    d = s.domain
    if d.is_sphere:
        z, _ = sphere_parameter_mesh(d, region, grid)
        return z, None
    z, w, _ = curve_parameter_mesh(d, region, grid)
    keep = np.abs(w) > 1e-9
    return z[keep], w[keep]


def _refine_singular(s: SurfaceData, z0: complex, w0: complex | None, h: float) -> tuple[complex, complex | None, float]:
    p = s.domain.branch_poly

    def point(x):
        z = complex(x[0], x[1])
        w = None if w0 is None else complex(_nearest_roots(np.array([p(z)]), np.array([w0]))[0])
        return z, w

    def objective(x):
        z, w = point(x)
        return float(_nu(s.phi(z, w)))

    x0 = np.array([z0.real, z0.imag])
    sol = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        bounds=[(x0[0] - h, x0[0] + h), (x0[1] - h, x0[1] + h)],
        options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 400},
    )
    z, w = point(sol.x)
    return z, w, float(sol.fun)


def regularity_scan(
    s: SurfaceData,
    region: Region | None = None,
    grid: int | None = None,
    config: NumericsConfig = DEFAULT_CONFIG,
) -> list[Witness]:
    """Sites where ``f_x × f_y`` vanishes.

    ``ν = |f_x × f_y| / |φ|²`` is sampled on the mesh points of the region;
    samples below ``threshold`` are refined by bounded local minimisation and
    kept when ``ν < singular_tol``.
    """
    cfg = config.scans["regularity"]
    region = region or Region()
    grid = grid or config.mesh_density
    z, w = _sample_points(s, region, grid)
    nu = _nu(s.phi(z, w))
    spacing = cKDTree(np.column_stack([z.real, z.imag])).query(np.column_stack([z.real, z.imag]), k=2)[0][:, 1]

    order = np.argsort(nu, kind="stable")
    order = order[nu[order] < cfg["threshold"]]
    keys = [(z[i], 0j if w is None else w[i]) for i in order]
    chosen = order[_dedupe(keys, cfg["merge_distance"], limit=4 * cfg["max_witnesses"])]
    logger.debug(f"{s.label}: {len(order)} samples with ν < {cfg['threshold']:g}, refining {len(chosen)}")

    refined = Parallel(n_jobs=config.threads, prefer="threads")(
        delayed(_refine_singular)(s, complex(z[i]), None if w is None else complex(w[i]), 2 * spacing[i])
        for i in chosen
    )
    hits = []
    for zr, wr, val in refined:
        if val < cfg["singular_tol"]:
            sheet = 0 if wr is None else int(s.domain.sheet_of(zr, wr))
            hits.append(Witness.singular_point(SheetPoint(zr, sheet), val))
    keys = [(h.points[0].z, complex(h.points[0].sheet)) for h in hits]
    hits = [hits[i] for i in _dedupe(keys, cfg["merge_distance"])]
    out = sort_witnesses(hits)[: cfg["max_witnesses"]]
    logger.info(f"{s.label}: regularity scan found {len(out)} singular points")
    return out


# ---------------------------------------------------------------------------
# Self-intersections
# ---------------------------------------------------------------------------


def _triangle_source(m: TriMesh, t: int) -> tuple[SheetPoint, float]:
    idx = m.triangles[t]
    zs = m.z[idx]
    sheets = [int(x) for x in m.sheet[idx] if x != 0]
    sheet = max(set(sheets), key=sheets.count) if sheets else 0
    diam = float(max(abs(zs[0] - zs[1]), abs(zs[1] - zs[2]), abs(zs[2] - zs[0])))
    return SheetPoint(complex(zs.mean()), sheet), diam


def self_intersection_scan(
    m: TriMesh, s: SurfaceData | None = None, config: NumericsConfig = DEFAULT_CONFIG
) -> list[Witness]:
    """Intersecting triangles that share no vertex.

    With ``s`` the pairs are refined to ``f(p1) = f(p2)`` and kept when the
    residual is below ``WITNESS_TOL · bbox``; without it the witnesses carry
    the triangle centroids and their image distance.
    """
    cfg = config.scans["self_intersection"]
    bbox = m.bbox_diag
    pairs = intersecting_pairs(m.vertices, m.triangles, cfg["leaf_size"], cfg["eps"] * bbox)
    if len(pairs) == 0:
        logger.info("Self-intersection scan: no intersecting triangles")
        return []
    sources = [(_triangle_source(m, i), _triangle_source(m, j)) for i, j in pairs]
    merge = max(max(a[1], b[1]) for a, b in sources) * 3
    keys = [(a[0].z, b[0].z) for a, b in sources]
    chosen = _dedupe(keys, merge, limit=2 * cfg["max_witnesses"])
    logger.debug(f"{len(pairs)} intersecting triangle pairs, {len(chosen)} after merging")

    if s is None:
        out = []
        for k in chosen:
            i, j = pairs[k]
            gap = np.linalg.norm(m.vertices[m.triangles[i]].mean(axis=0) - m.vertices[m.triangles[j]].mean(axis=0))
            out.append(Witness.pair(WitnessKind.SELF_INTERSECTION, sources[k][0][0], sources[k][1][0], gap))
        return sort_witnesses(out)[: cfg["max_witnesses"]]

    ev = Evaluator(s, config)
    tol = WITNESS_TOL * bbox
    refined = Parallel(n_jobs=config.threads, prefer="threads")(
        delayed(_refine_pair)(ev, sources[k][0][0], sources[k][1][0], 2 * max(sources[k][0][1], sources[k][1][1]))
        for k in chosen
    )
    out = []
    for k, res in zip(chosen, refined, strict=True):
        if res is None:
            continue
        q1, q2, dist = res
        apart = float(parameter_distance(s, q1.z, q1.sheet, q2.z, q2.sheet))
        if dist < tol and apart > 0.5 * max(sources[k][0][1], sources[k][1][1]):
            out.append(Witness.pair(WitnessKind.SELF_INTERSECTION, q1, q2, dist))
    out = sort_witnesses(out)[: cfg["max_witnesses"]]
    logger.info(f"Self-intersection scan: {len(out)} verified witnesses")
    return out


# ---------------------------------------------------------------------------
# Injectivity
# ---------------------------------------------------------------------------


def injectivity_witness_search(
    s: SurfaceData,
    region: Region | None = None,
    mesh: TriMesh | None = None,
    config: NumericsConfig = DEFAULT_CONFIG,
) -> list[Witness]:
    """Distinct parameters with the same image.

    Mesh vertices are bucketed with a k-d tree; image pairs closer than
    ``radius_factor`` times the local edge length whose parameters are at
    least ``min_param_distance`` apart are refined to ``f(p1) = f(p2)``.
    """
    cfg = config.scans["injectivity"]
    m = mesh or build_mesh(s, region, config=config, with_normals=False)
    scale = m.vertex_scale()
    tree = cKDTree(m.vertices)
    pairs = tree.query_pairs(cfg["radius_factor"] * float(scale.max()), output_type="ndarray")
    if len(pairs) == 0:
        return []
    i, j = pairs[:, 0], pairs[:, 1]
    gap = np.linalg.norm(m.vertices[i] - m.vertices[j], axis=1)
    close = gap <= cfg["radius_factor"] * np.minimum(scale[i], scale[j])
    apart = parameter_distance(s, m.z[i], m.sheet[i], m.z[j], m.sheet[j]) >= cfg["min_param_distance"]
    keep = np.flatnonzero(close & apart)
    keep = keep[np.argsort(gap[keep], kind="stable")][: cfg["max_candidates"]]
    logger.debug(f"{s.label}: {len(keep)} coincidence candidates")
    if len(keep) == 0:
        return []

    src = [(m.source(int(i[k])), m.source(int(j[k]))) for k in keep]
    step = m.parameter_scale()
    chosen = _dedupe([(a.z, b.z) for a, b in src], cfg["min_param_distance"] / 2, limit=2 * cfg["max_witnesses"])
    ev = Evaluator(s, config)
    tol = WITNESS_TOL * m.bbox_diag
    refined = Parallel(n_jobs=config.threads, prefer="threads")(
        delayed(_refine_pair)(ev, src[k][0], src[k][1], 2 * float(max(step[i[keep[k]]], step[j[keep[k]]])))
        for k in chosen
    )
    out = []
    for res in refined:
        if res is None:
            continue
        q1, q2, dist = res
        if dist < tol and float(parameter_distance(s, q1.z, q1.sheet, q2.z, q2.sheet)) >= cfg["min_param_distance"]:
            out.append(Witness.pair(WitnessKind.COINCIDENT_PAIR, q1, q2, dist))
    out = sort_witnesses(out)[: cfg["max_witnesses"]]
    logger.info(f"{s.label}: injectivity search found {len(out)} coincident pairs")
    return out


__all__ = [
    "chordal_distance",
    "injectivity_witness_search",
    "parameter_distance",
    "regularity_scan",
    "self_intersection_scan",
]
