"""Closing real periods by adding holomorphic forms with free real parameters.

A period problem is linear: adding ``λ·g`` to a form shifts every period by
``λ`` times the period of ``g``. The solver uses that directly and falls back
to bisection over the declared bracket when the linear system is singular.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.optimize import bisect

from hsurf.config import DEFAULT_CONFIG, NumericsConfig, config_id, content_hash
from hsurf.errors import NoBracket, PeriodsNotClosed
from hsurf.periods.cycles import Cycle, PunctureLoop, form_cycle_integral, homology_basis
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData

logger = logging.getLogger(__name__)

# Surface as a function of the free parameters
SurfaceTemplate = Callable[[Mapping[str, float]], SurfaceData]


@dataclass(frozen=True)
class FreeParam:
    """Real parameter ``λ`` multiplying a holomorphic generator in one form.

    ``cycle`` is the cycle whose real period of form ``form_index`` (1-based)
    the parameter is solved against; ``bracket`` is the interval declared for
    the bisection fallback.
    """

    name: str
    form_index: int
    cycle: Cycle
    bracket: tuple[float, float]

    def __post_init__(self):
        if self.form_index not in (1, 2, 3):
            raise ValueError(f"form_index must be 1, 2 or 3, got {self.form_index}")
        lo, hi = self.bracket
        if not lo < hi:
            raise ValueError(f"Bracket for {self.name} must satisfy lo < hi, got {self.bracket}")


@dataclass
class PeriodProblem:
    """Surface ``Ω(λ) = Ω⁰ + Σ_j λ_j g_j`` and the cycles whose real periods must vanish.

    Attributes
    ----------
    surface : SurfaceData
        ``Ω⁰``, the surface with every parameter at 0.
    free_params : list of FreeParam
    generators : dict
        Parameter name to the triple of forms it multiplies.
    cycles : list of Cycle
        Homology basis and puncture loops checked after solving.
    """

    surface: SurfaceData
    free_params: list[FreeParam]
    generators: dict[str, tuple[MeromorphicForm, MeromorphicForm, MeromorphicForm]]
    cycles: list[Cycle] = field(default_factory=list)

    @classmethod
    def from_surface_template(
        cls,
        template: SurfaceTemplate,
        free_params: Sequence[FreeParam],
        cycles: Sequence[Cycle] = (),
        n_checks: int = 5,
        seed: int = 0,
    ) -> PeriodProblem:
        """Extract the linear structure of ``template``.

        Evaluates the template with all parameters at 0, and with each one at
        1 in turn; the differences are the generators. Linearity is checked by
        comparing the template at ``λ = 2`` with the prediction at random points.

        Raises
        ------
        ValueError
            If the template is not affine in a parameter.
        """
        names = [fp.name for fp in free_params]
        zero = {n: 0.0 for n in names}
        base = template(zero)
        generators = {}
        rng = np.random.default_rng(seed)
        zs = rng.uniform(-1.3, 1.3, n_checks) + 1j * rng.uniform(0.2, 1.3, n_checks)
        ws = None if base.domain.is_sphere else base.domain.w_plus(zs)
        for n in names:
            one = template({**zero, n: 1.0})
            two = template({**zero, n: 2.0})
            gens = tuple(f1 - f0 for f0, f1 in zip(base.omega, one.omega, strict=True))
            predicted = base.phi(zs, ws) + 2 * np.stack([g(zs, ws) for g in gens], axis=-1)
            actual = two.phi(zs, ws)
            scale = 1 + np.abs(actual).max()
            if np.abs(predicted - actual).max() > 1e-9 * scale:
                raise ValueError(f"Surface template is not affine in parameter {n!r}")
            generators[n] = gens
        return cls(base, list(free_params), generators, list(cycles))

    def instantiate(self, values: Mapping[str, float]) -> SurfaceData:
        omega = list(self.surface.omega)
        for n, lam in values.items():
            if lam == 0:
                continue
            omega = [f + g.scale(lam) for f, g in zip(omega, self.generators[n], strict=True)]
        return self.surface.with_omega(omega)

    def target_period(self, j: int, values: Mapping[str, float], config: NumericsConfig = DEFAULT_CONFIG) -> float:
        """Real period that parameter ``j`` is solved against, at ``values``."""
        fp = self.free_params[j]
        s = self.instantiate(values)
        return form_cycle_integral(s.domain, s.omega[fp.form_index - 1], fp.cycle, config).real


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------


def _cache_path(config: NumericsConfig, key: Mapping):
    if config.cache_dir is None or key is None:
        return None
    tag = content_hash({"key": dict(key), "config": config_id(config)})
    return config.cache_dir / f"periods-{tag}.json"


def _read_cache(path, names: list[str]) -> list[float] | None:
    if path is None or not path.exists():
        return None
    data = json.loads(path.read_text())
    if data.get("names") != names:
        return None
    logger.info(f"Period solution cache hit: {path.name}")
    return [float(v) for v in data["values"]]


def _write_cache(path, key: Mapping, names: list[str], values: list[float]) -> None:
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"key": dict(key), "names": names, "values": values}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------


def _bisect_param(problem: PeriodProblem, j: int, values: dict[str, float], config: NumericsConfig) -> float:
    fp = problem.free_params[j]
    lo, hi = fp.bracket

    def target(lam: float) -> float:
        return problem.target_period(j, {**values, fp.name: lam}, config)

    f_lo, f_hi = target(lo), target(hi)
    if f_lo * f_hi > 0:
        raise NoBracket(
            f"Real period of ω{fp.form_index} on {fp.cycle} has constant sign over "
            f"{fp.name} ∈ [{lo}, {hi}] ({f_lo:.3e}, {f_hi:.3e})"
        )
    logger.info(f"Bisecting {fp.name} over [{lo}, {hi}]")
    return float(bisect(target, lo, hi, xtol=config.bisect_xtol))


def close_periods(
    problem: PeriodProblem,
    config: NumericsConfig = DEFAULT_CONFIG,
    cache_key: Mapping | None = None,
) -> list[float]:
    """Solve for the parameter values that make the real periods vanish.

    Parameters
    ----------
    problem : PeriodProblem
    config : NumericsConfig
    cache_key : mapping, optional
        Identifies the problem (e.g. fixture id and bindings) in the solution
        cache; the cache is used when ``config.cache`` is set.

    Returns
    -------
    list of float
        One value per free parameter, in declaration order.

    Raises
    ------
    NoBracket
        If the linear system is singular and a target period keeps its sign
        over the declared bracket.
    PeriodsNotClosed
        If a real period on ``problem.cycles`` exceeds ``config.period_tol``
        after solving.
    """
    names = [fp.name for fp in problem.free_params]
    path = _cache_path(config, cache_key)
    cached = _read_cache(path, names)
    if cached is not None:
        return cached
    if not names:
        verify_closed(problem.surface, problem.cycles, config)
        return []

    zero = {n: 0.0 for n in names}
    s0 = problem.surface
    b = np.array([problem.target_period(j, zero, config) for j in range(len(names))])
    a = np.zeros((len(names), len(names)))
    for j, fp in enumerate(problem.free_params):
        for k, n in enumerate(names):
            g = problem.generators[n][fp.form_index - 1]
            a[j, k] = form_cycle_integral(s0.domain, g, fp.cycle, config).real

    scale = max(np.abs(a).max(), 1e-300)
    if abs(np.linalg.det(a / scale)) > 1e-10:
        lam = np.linalg.solve(a, -b)
        values = dict(zip(names, (float(v) for v in lam), strict=True))
        logger.debug(f"Linear period solve: {values}")
    else:
        values = dict(zero)
        for j, n in enumerate(names):
            values[n] = _bisect_param(problem, j, values, config)

    for fp in problem.free_params:
        lo, hi = fp.bracket
        if not lo <= values[fp.name] <= hi:
            logger.warning(f"{fp.name} = {values[fp.name]:.12g} lies outside its bracket [{lo}, {hi}]")

    result = [values[n] for n in names]
    verify_closed(problem.instantiate(values), problem.cycles, config)
    _write_cache(path, cache_key, names, result)
    return result


def verify_closed(s: SurfaceData, cycles: Sequence[Cycle], config: NumericsConfig = DEFAULT_CONFIG) -> None:
    """Raise :class:`PeriodsNotClosed` unless every real period is below tolerance."""
    report = period_report(s, cycles, config)
    bad = report[report["flagged"]]
    if not bad.empty:
        worst = bad.loc[bad["re"].abs().idxmax()]
        raise PeriodsNotClosed(
            f"{len(bad)} real period(s) above {config.period_tol:g}; worst "
            f"Re ∮ ω{worst['form']} over {worst['cycle']} = {worst['re']:.3e}"
        )


def period_report(
    s: SurfaceData,
    cycles: Sequence[Cycle] | None = None,
    config: NumericsConfig = DEFAULT_CONFIG,
) -> pd.DataFrame:
    """Real and imaginary periods of every form on every cycle.

    Puncture loops for every puncture are always included. With ``cycles``
    left as ``None`` the homology basis of a curve is added (see
    :func:`~hsurf.periods.cycles.homology_basis`); an explicit sequence, even an
    empty one, replaces it. Only real parts are flagged (``|Re| > period_tol``); imaginary parts are informational.

    Returns
    -------
    pd.DataFrame
        Columns ``cycle``, ``form``, ``re``, ``im``, ``flagged``.
    """
    all_cycles: list[Cycle] = [PunctureLoop(p) for p in s.punctures]
    for c in homology_basis(s.domain) if cycles is None else cycles:
        if c not in all_cycles:
            all_cycles.append(c)
    jobs = [(c, i) for c in all_cycles for i in (1, 2, 3)]
    values = Parallel(n_jobs=config.threads, prefer="threads")(
        delayed(form_cycle_integral)(s.domain, s.omega[i - 1], c, config) for c, i in jobs
    )
    rows = []
    for (c, i), v in zip(jobs, values, strict=True):
        flagged = abs(v.real) > config.period_tol
        if flagged:
            logger.debug(f"{s.label}: Re ∮ ω{i} over {c} = {v.real:.3e}")
        rows.append({"cycle": str(c), "form": i, "re": v.real, "im": v.imag, "flagged": flagged})
    return pd.DataFrame(rows, columns=["cycle", "form", "re", "im", "flagged"])


__all__ = [
    "FreeParam",
    "PeriodProblem",
    "SurfaceTemplate",
    "close_periods",
    "period_report",
    "verify_closed",
]
