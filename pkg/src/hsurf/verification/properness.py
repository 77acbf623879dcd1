"""Properness probes at a puncture.

``f`` is proper at an end when ``min |f|`` over small circles about the
puncture tends to infinity. The probe samples circles that shrink
geometrically in the local chart, refines each circle's minimum with a
bounded scalar minimisation in the angle, and fits the minima against
``log(1/r)``: a slope above ``slope_tol`` is an escape, anything else is a
bounded sequence and is returned as a witness.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from hsurf.algebra.parser import parse_expression
from hsurf.algebra.rational import INFINITY, is_infinity
from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.evaluation.evaluate import Evaluator
from hsurf.surfaces.charts import Chart, ChartKind
from hsurf.surfaces.domains import SheetPoint, w_value
from hsurf.surfaces.forms import SurfaceData
from hsurf.verification.mesh import _nearest_roots
from hsurf.verification.witnesses import Witness

logger = logging.getLogger(__name__)

# Angular samples per circle are divided by this on curves (path evaluation)
_CURVE_THETA_DIVISOR: int = 6

# Circle minima refinement: passes and bracket shrink per pass
_REFINE_PASSES: int = 3
_BRACKET_SHRINK: float = 1e-6

# Rounding floor of |f| on a circle, in units of eps * max |f|
_RESOLUTION_FACTOR: float = 64.0

# Circles whose resolution exceeds this are dropped from the fit
_MAX_RESOLUTION: float = 1e-3

# Fewest circles a slope is fitted on
_MIN_CIRCLES: int = 6


@dataclass(frozen=True)
class Escapes:
    """``min |f|`` grows at the puncture."""

    puncture: SheetPoint
    radii: tuple[float, ...]
    minima: tuple[float, ...]
    slope: float

    def __str__(self) -> str:
        return f"Escapes at {self.puncture}: min |f| grows with slope {self.slope:.3g} in log(1/r)"


ProbeResult = Witness | Escapes


def _chart_for(s: SurfaceData, p: SheetPoint) -> Chart:
    d = s.domain
    if d.is_sphere:
        return Chart(ChartKind.SPHERE_INF if p.is_infinity else ChartKind.PLANE, 0j if p.is_infinity else p.z, d)
    if p.is_infinity:
        return Chart(ChartKind.CURVE_INF, 0j, d)
    if d.is_ramified(p.z):
        return Chart(ChartKind.BRANCH, p.z, d)
    return Chart(ChartKind.PLANE, p.z, d)


class _CirclePoints:
    """Maps a chart coordinate ``t`` near the puncture to a sheet point."""

    def __init__(self, s: SurfaceData, p: SheetPoint):
        self.surface = s
        self.chart = _chart_for(s, p)
        self.puncture = p
        d = s.domain
        self._w_center = None
        if not d.is_sphere and self.chart.kind is ChartKind.PLANE:
            self._w_center = w_value(d, p)

    def __call__(self, t) -> list[SheetPoint]:
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        z = self.chart.z(t)
        d = self.surface.domain
        if d.is_sphere:
            return [SheetPoint(zi, 0) for zi in z]
        if self.chart.kind is ChartKind.PLANE:
            w = _nearest_roots(d.p(z), np.full(len(z), self._w_center))
        else:
            w = self.chart.w_branches(t)[0]
        sheets = np.atleast_1d(d.sheet_of(z, w))
        return [SheetPoint(zi, int(si)) for zi, si in zip(z, sheets, strict=True)]


def _norms(ev: Evaluator, pts: Sequence[SheetPoint]) -> np.ndarray:
    if ev.domain.is_sphere:
        z = np.array([p.z for p in pts])
        return np.linalg.norm(np.atleast_2d(ev.f_a(z) - ev._offset), axis=-1)
    return np.array([np.linalg.norm(ev(p)) for p in pts])


def circle_minimum(
    ev: Evaluator, points: _CirclePoints, r: float, n_theta: int
) -> tuple[SheetPoint, float, float]:
    """``min_θ |f|`` on ``|t| = r``, the point attaining it and its resolution.

    The grid minimum is refined by bounded minimisation in an angular offset
    about the current best point, the bracket shrinking each pass so the
    minimiser's relative tolerance does not cap the angular precision. Valleys
    of ``|f|`` narrow like a power of ``r`` near a higher-order pole.

    The resolution is the size below which ``|f|`` cannot be told apart from
    rounding on this circle; it scales with ``max_θ |f|``.
    """
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    pts = points(r * np.exp(1j * theta))
    vals = _norms(ev, pts)
    k = int(np.argmin(vals))
    resolution = _RESOLUTION_FACTOR * np.finfo(float).eps * float(vals.max())

    base = r * np.exp(1j * theta[k])
    best_pt, best = pts[k], float(vals[k])
    half = 2 * np.pi / n_theta
    for _ in range(_REFINE_PASSES):

        def objective(d, base=base):
            return float(_norms(ev, points(base * np.exp(1j * d)))[0])

        sol = minimize_scalar(objective, bounds=(-half, half), method="bounded", options={"xatol": half * 1e-9})
        if sol.fun < best:
            base = base * np.exp(1j * sol.x)
            best_pt, best = points(base)[0], float(sol.fun)
        half *= _BRACKET_SHRINK
        if half < 4 * np.finfo(float).eps:
            break
    return best_pt, best, resolution


def _slope(u: np.ndarray, m: np.ndarray) -> float:
    half = len(u) // 2
    return float(np.polyfit(u[half:], m[half:], 1)[0])


def properness_probe(
    s: SurfaceData,
    p: SheetPoint | complex | str,
    config: NumericsConfig = DEFAULT_CONFIG,
    curve: Sequence[SheetPoint | complex] | None = None,
) -> ProbeResult:
    """Probe whether ``f`` escapes to infinity at the puncture ``p``.

    Parameters
    ----------
    s : SurfaceData
    p : SheetPoint, complex or "inf"
    config : NumericsConfig
        ``config.scans["properness"]`` sets the circles.
    curve : sequence, optional
        Parameter points running into ``p``; ``f`` is followed along them
        instead of over circles.

    Returns
    -------
    Witness or Escapes
        A ``bounded_escape`` witness carrying the points of bounded ``|f|``,
        or :class:`Escapes`.
    """
    if isinstance(p, str):
        if p.strip().lower() not in ("inf", "infinity", "∞"):
            raise ValueError(f"Unknown puncture {p!r}")
        p = SheetPoint(INFINITY, 0)
    elif not isinstance(p, SheetPoint):
        p = SheetPoint(p, 0)
    p = next((q for q in s.punctures if _same_point(q, p)), None) or p
    if not any(_same_point(q, p) for q in s.punctures):
        raise ValueError(f"{p} is not a puncture of {s!r}")

    cfg = config.scans["properness"]
    ev = Evaluator(s, config)
    if curve is not None:
        return _probe_curve(s, p, ev, curve, cfg["slope_tol"])

    points = _CirclePoints(s, p)
    n_theta = cfg["n_theta"] if s.domain.is_sphere else max(24, cfg["n_theta"] // _CURVE_THETA_DIVISOR)
    radii = cfg["r_start"] * cfg["shrink"] ** np.arange(cfg["n_circles"])
    kept, mins, argmins = [], [], []
    for r in radii:
        q, m, resolution = circle_minimum(ev, points, float(r), n_theta)
        if resolution > _MAX_RESOLUTION and len(kept) >= _MIN_CIRCLES:
            logger.debug(f"{s.label}: |f| unresolved below {resolution:.3g} at |t|={r:.3g}; stopping")
            break
        kept.append(r)
        mins.append(m)
        argmins.append(q)
        logger.debug(f"{s.label}: |t|={r:.3g}, min |f| = {m:.6g} at {q}")
    radii = np.array(kept)
    m = np.array(mins)
    slope = _slope(np.log(1 / radii), m)
    if slope > cfg["slope_tol"]:
        return Escapes(p, tuple(float(r) for r in radii), tuple(float(x) for x in m), slope)
    half = len(radii) // 2
    bound = float(m[half:].max())
    logger.info(f"{s.label}: |f| stays below {bound:.3g} at {p} (slope {slope:.3g})")
    return Witness.bounded_escape(argmins[half:], bound, slope=f"{slope:.3g}")


def _same_point(a: SheetPoint, b: SheetPoint) -> bool:
    if a.is_infinity or b.is_infinity:
        return a.is_infinity and b.is_infinity
    return abs(a.z - b.z) <= 1e-9 and (a.sheet == b.sheet or 0 in (a.sheet, b.sheet))


def _probe_curve(
    s: SurfaceData, p: SheetPoint, ev: Evaluator, curve: Sequence[SheetPoint | complex], slope_tol: float
) -> ProbeResult:
    default_sheet = 0 if s.domain.is_sphere else 1
    pts = [q if isinstance(q, SheetPoint) else SheetPoint(q, default_sheet) for q in curve]
    z = np.array([q.z for q in pts])
    u = np.log(np.abs(z)) if p.is_infinity else -np.log(np.abs(z - p.z))
    vals = np.array([np.linalg.norm(ev(q)) for q in pts])
    slope = _slope(u, vals)
    if slope > slope_tol:
        return Escapes(p, tuple(float(np.exp(-x)) for x in u), tuple(float(v) for v in vals), slope)
    half = len(pts) // 2
    return Witness.bounded_escape(pts[half:], float(vals[half:].max()), slope=f"{slope:.3g}")


def parametric_curve(
    expr: str,
    t_range: tuple[float, float],
    n: int = 40,
    params: Mapping[str, complex | float | int] | None = None,
) -> np.ndarray:
    """Points ``expr(t)`` for ``t`` geometric over ``t_range``.

    ``expr`` is a rational expression in ``z``, which plays the role of the
    real curve parameter, e.g. ``"(-1)^n/z^(2*n-1) + i*z"``.
    """
    e = parse_expression(expr, None, params)
    t = np.geomspace(t_range[0], t_range[1], n)
    out = np.asarray(e.a(t), dtype=complex)
    if np.any(~np.isfinite(out)) or any(is_infinity(v) for v in out):
        raise ValueError(f"Curve {expr!r} is not finite on {t_range}")
    return out


__all__ = [
    "Escapes",
    "ProbeResult",
    "circle_minimum",
    "parametric_curve",
    "properness_probe",
]
