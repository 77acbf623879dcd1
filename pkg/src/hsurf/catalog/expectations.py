"""Check a fixture against the properties recorded in the catalog.

Claims are grouped by check name. Each check instantiates what it needs
from the surface, compares against the recorded value and reports one
:class:`ClaimResult` per claim; claims whose ``where`` condition fails for
the current bindings are reported as skipped.

Claim formats
-------------
``degenerate``  ``{"value": true}``
``types``       ``{"puncture", "reduced", "raw"?}``; entries may be expressions
``verdicts``    ``{"puncture", "verdict", "rule"?}``
``curvature``   ``{"multiple", "numeric"?}``; ``numeric`` also integrates ``K dA``
``periods``     ``{"closed": true}`` or ``{"param", "value"|"range", "tol"?}``
``values``      ``{"point", "sheet"?, "coordinate", "value", "tol"?}``
``symmetry``    a :class:`~hsurf.verification.symmetry.SymmetryDescriptor` mapping
``regular``     ``{"value", "region"?, "density"?, "witness"?}``
``embedded``    ``{"value", "region"?, "density"?, "witness"?}``
``proper``      ``{"puncture", "value", "curve"?: {"expr", "t_range"}}``
``topology``    ``{"boundary_loops", "euler"?, "region"?, "density"?}``
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from hsurf.algebra.parser import parse_constant
from hsurf.catalog.fixtures import CLAIM_KINDS, Fixture, Values, condition_holds, find, parse_point
from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.ends.admissibility import admissibility
from hsurf.ends.curvature import format_curvature, total_curvature
from hsurf.ends.types import EndType, check_nondegenerate, end_type, format_type
from hsurf.errors import DegenerateTriple
from hsurf.evaluation.evaluate import evaluate
from hsurf.evaluation.integrate import integrate_curvature
from hsurf.periods.closing import period_report
from hsurf.surfaces.domains import SheetPoint
from hsurf.surfaces.forms import SurfaceData
from hsurf.verification.mesh import Region, TriMesh, build_mesh
from hsurf.verification.properness import Escapes, parametric_curve, properness_probe
from hsurf.verification.scans import injectivity_witness_search, regularity_scan, self_intersection_scan
from hsurf.verification.symmetry import SymmetryDescriptor, check_symmetry
from hsurf.verification.witnesses import Witness

logger = logging.getLogger(__name__)

# Numeric curvature must match the budget to this relative tolerance
CURVATURE_RTOL: float = 0.01
# Default relative tolerance of closed-form value claims
VALUE_TOL: float = 1e-8

CHECKS = CLAIM_KINDS
CHEAP_CHECKS = ("degenerate", "types", "verdicts", "curvature", "values")


@dataclass(frozen=True)
class ClaimResult:
    """Outcome of one claim; ``passed`` is None when the claim was skipped."""

    fixture: str
    check: str
    claim: str
    expected: str
    observed: str
    passed: bool | None
    citation: str
    detail: str = ""

    @property
    def status(self) -> str:
        return {True: "pass", False: "FAIL", None: "skip"}[self.passed]


@dataclass
class ExpectationReport:
    fixture: str
    bindings: dict[str, float | int]
    results: list[ClaimResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.results)

    def failed(self) -> list[ClaimResult]:
        return [r for r in self.results if r.passed is False]

    def counts(self) -> dict[str, int]:
        return {
            "n_claims": len(self.results),
            "n_passed": sum(r.passed is True for r in self.results),
            "n_failed": sum(r.passed is False for r in self.results),
            "n_skipped": sum(r.passed is None for r in self.results),
        }

    def to_frame(self) -> pd.DataFrame:
        columns = ["fixture", "check", "claim", "expected", "observed", "passed", "citation", "detail"]
        return pd.DataFrame([asdict(r) for r in self.results], columns=columns)

    def to_dict(self) -> dict:
        return {
            "fixture": self.fixture,
            "bindings": dict(self.bindings),
            "passed": self.passed,
            **self.counts(),
            "results": [asdict(r) for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)

    def to_text(self) -> str:
        lines = [f"{self.fixture} {json.dumps(self.bindings, sort_keys=True) if self.bindings else ''}".rstrip()]
        for r in self.results:
            lines.append(f"  [{r.status:4}] {r.check:<10} {r.claim}: expected {r.expected}, observed {r.observed}  {r.citation}")
            if r.detail and r.passed is False:
                lines.extend(f"         {line}" for line in r.detail.splitlines())
        c = self.counts()
        lines.append(f"  {c['n_passed']} passed, {c['n_failed']} failed, {c['n_skipped']} skipped")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Context shared by the checks of one run
# ---------------------------------------------------------------------------


class _Context:
    def __init__(self, fixture: Fixture, values: Values, config: NumericsConfig):
        self.fixture = fixture
        self.values = values
        self.config = config
        self._surface: SurfaceData | None = None
        self._types: dict[SheetPoint, EndType] = {}
        self._meshes: dict[tuple, TriMesh] = {}

    @property
    def surface(self) -> SurfaceData:
        if self._surface is None:
            self._surface = self.fixture.surface(self.values)
        return self._surface

    def end_type(self, p: SheetPoint) -> EndType:
        if p not in self._types:
            self._types[p] = end_type(self.surface, p, self.config)
        return self._types[p]

    def region(self, claim: Mapping) -> Region:
        return Region(*claim["region"]) if "region" in claim else Region()

    def density(self, claim: Mapping) -> int:
        return int(claim.get("density", self.config.mesh_density))

    def mesh(self, claim: Mapping) -> TriMesh:
        region, density = self.region(claim), self.density(claim)
        key = (region.r_min, region.r_max, density)
        if key not in self._meshes:
            self._meshes[key] = build_mesh(self.surface, region, density, self.config)
        return self._meshes[key]

    def number(self, expr: Any) -> complex:
        return parse_constant(expr, self.values)

    def integer(self, expr: Any) -> int:
        return int(round(self.number(expr).real))

    def result(self, check: str, claim: Mapping, name: str, expected: Any, observed: Any, passed: bool | None, detail: str = "") -> ClaimResult:
        return ClaimResult(self.fixture.id, check, name, str(expected), str(observed), passed, claim["citation"], detail)


def _witness_text(witnesses: Iterable[Witness], limit: int = 3) -> str:
    return "\n".join(w.format() for w in list(witnesses)[:limit])


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def _check_degenerate(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    try:
        check_nondegenerate(ctx.surface, config=ctx.config)
        observed = False
    except DegenerateTriple:
        observed = True
    expected = bool(claim.get("value", True))
    return [ctx.result("degenerate", claim, "real-linear dependence", expected, observed, observed == expected)]


def _check_types(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    out = []
    reduced = tuple(sorted(ctx.integer(v) for v in claim["reduced"]))
    raw = tuple(sorted(ctx.integer(v) for v in claim["raw"])) if "raw" in claim else None
    for p in ctx.fixture.punctures_for(ctx.surface, claim["puncture"], ctx.values):
        t = ctx.end_type(p)
        ok = t.reduced == reduced and (raw is None or t.raw == raw)
        expected = format_type(reduced) if raw is None else f"{format_type(reduced)} (raw {format_type(raw)})"
        observed = str(t) if raw is None else f"{t} (raw {format_type(t.raw)})"
        out.append(ctx.result("types", claim, f"type at {p}", expected, observed, ok))
    return out


def _check_verdicts(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    out = []
    for p in ctx.fixture.punctures_for(ctx.surface, claim["puncture"], ctx.values):
        v = admissibility(ctx.end_type(p))
        ok = v.verdict.value == claim["verdict"] and ("rule" not in claim or v.rule == claim["rule"])
        expected = claim["verdict"] if "rule" not in claim else f"{claim['verdict']} {claim['rule']}"
        out.append(ctx.result("verdicts", claim, f"verdict at {p}", expected, v, ok))
    return out


def _check_curvature(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    s = ctx.surface
    multiple = ctx.integer(claim["multiple"])
    budget = total_curvature(s, {p: ctx.end_type(p) for p in s.punctures})
    out = [ctx.result("curvature", claim, "budget", format_curvature(multiple), budget, budget.multiple == multiple)]
    if claim.get("numeric"):
        target = 2 * math.pi * multiple
        value = integrate_curvature(s, config=ctx.config)
        rel = abs(value - target) / abs(target)
        out.append(
            ctx.result(
                "curvature",
                claim,
                "integral of K dA",
                f"{target:.6g} ± {CURVATURE_RTOL:.0%}",
                f"{value:.6g}",
                rel <= CURVATURE_RTOL,
                f"relative error {rel:.3g}",
            )
        )
    return out


def _check_periods(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    if claim.get("closed"):
        report = period_report(ctx.surface, ctx.fixture.period_cycles(ctx.values), ctx.config)
        worst = float(report["re"].abs().max()) if not report.empty else 0.0
        bad = report[report["flagged"]]
        detail = "\n".join(f"Re ∮ ω{r.form} over {r.cycle} = {r.re:.3e}" for r in bad.itertuples())
        return [
            ctx.result(
                "periods", claim, "real periods vanish", f"< {ctx.config.period_tol:g}", f"max {worst:.3e}", bad.empty, detail
            )
        ]
    name = claim["param"]
    value = ctx.values[name]
    if "range" in claim:
        lo, hi = (ctx.number(b).real for b in claim["range"])
        return [ctx.result("periods", claim, f"{name} in range", f"({lo:g}, {hi:g})", f"{value:.12g}", lo < value < hi)]
    target = ctx.number(claim["value"]).real
    tol = float(claim.get("tol", VALUE_TOL))
    return [ctx.result("periods", claim, f"{name} value", f"{target:.12g}", f"{value:.12g}", abs(value - target) <= tol)]


def _check_values(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    pt = parse_point(claim["point"], ctx.values)
    if "sheet" in claim:
        pt = SheetPoint(pt.z, int(claim["sheet"]))
    i = int(claim["coordinate"])
    target = ctx.number(claim["value"]).real
    observed = float(evaluate(ctx.surface, pt, ctx.config)[i - 1])
    tol = float(claim.get("tol", VALUE_TOL)) * max(1.0, abs(target))
    return [ctx.result("values", claim, f"f{i}({pt})", f"{target:.12g}", f"{observed:.12g}", abs(observed - target) <= tol)]


def _check_symmetry(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    kind, _, order = claim["domain_map"].partition(":")
    data = {
        "domain_map": f"{kind}:{ctx.integer(order)}" if order else kind,
        "matrix": [[ctx.number(x).real for x in row] for row in claim["matrix"]],
        "name": claim.get("name", kind),
    }
    if "translation" in claim:
        data["translation"] = [ctx.number(x).real for x in claim["translation"]]
    desc = SymmetryDescriptor.from_dict(data)
    res = check_symmetry(ctx.surface, desc, config=ctx.config)
    expected = bool(claim.get("value", True))
    return [
        ctx.result(
            "symmetry",
            claim,
            desc.name or desc.domain_map,
            "symmetric" if expected else "not symmetric",
            f"max deviation {res.max_deviation:.3g}",
            res.passed == expected,
            f"translation {np.round(res.translation, 12).tolist()}",
        )
    ]


def _witness_outcome(witnesses: list[Witness], claim: Mapping) -> bool:
    if claim["value"]:
        return not witnesses
    kind = claim.get("witness")
    return any(w.kind.value == kind for w in witnesses) if kind else bool(witnesses)


def _check_regular(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    region = ctx.region(claim)
    witnesses = regularity_scan(ctx.surface, region, ctx.density(claim), ctx.config)
    observed = "regular" if not witnesses else f"{len(witnesses)} singular point(s)"
    expected = "regular" if claim["value"] else "singular"
    return [
        ctx.result(
            "regular", claim, f"regular on {region.r_min:g} ≤ r ≤ {region.r_max:g}", expected, observed,
            _witness_outcome(witnesses, claim), _witness_text(witnesses),
        )
    ]


def _check_embedded(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    region = ctx.region(claim)
    mesh = ctx.mesh(claim)
    witnesses = self_intersection_scan(mesh, ctx.surface, ctx.config)
    witnesses += injectivity_witness_search(ctx.surface, region, mesh, ctx.config)
    observed = "embedded" if not witnesses else ", ".join(sorted({w.kind.value for w in witnesses}))
    expected = "embedded" if claim["value"] else claim.get("witness", "not embedded")
    return [
        ctx.result(
            "embedded", claim, f"embedded on {region.r_min:g} ≤ r ≤ {region.r_max:g}", expected, observed,
            _witness_outcome(witnesses, claim), _witness_text(witnesses),
        )
    ]


def _check_proper(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    out = []
    curve = None
    if "curve" in claim:
        c = claim["curve"]
        curve = parametric_curve(c["expr"], tuple(c["t_range"]), int(c.get("n", 40)), ctx.values)
    for p in ctx.fixture.punctures_for(ctx.surface, claim["puncture"], ctx.values):
        res = properness_probe(ctx.surface, p, ctx.config, curve=curve)
        proper = isinstance(res, Escapes)
        detail = "" if proper else res.format()
        out.append(
            ctx.result(
                "proper", claim, f"proper at {p}", "proper" if claim["value"] else "not proper",
                res if proper else f"bounded below {res.dist:.3g}", proper == bool(claim["value"]), detail,
            )
        )
    return out


def _check_topology(ctx: _Context, claim: Mapping) -> list[ClaimResult]:
    mesh = ctx.mesh(claim)
    out = []
    loops = ctx.integer(claim["boundary_loops"])
    out.append(ctx.result("topology", claim, "boundary loops", loops, mesh.boundary_loops(), mesh.boundary_loops() == loops))
    if "euler" in claim:
        chi = ctx.integer(claim["euler"])
        observed = mesh.euler_characteristic()
        out.append(ctx.result("topology", claim, "Euler characteristic", chi, observed, observed == chi))
    return out


_CHECKERS: dict[str, Callable[[_Context, Mapping], list[ClaimResult]]] = {
    "degenerate": _check_degenerate,
    "types": _check_types,
    "verdicts": _check_verdicts,
    "curvature": _check_curvature,
    "periods": _check_periods,
    "values": _check_values,
    "symmetry": _check_symmetry,
    "regular": _check_regular,
    "embedded": _check_embedded,
    "proper": _check_proper,
    "topology": _check_topology,
}


def run_expectations(
    fixture: Fixture | str,
    bindings: Mapping[str, Any] | None = None,
    checks: Iterable[str] | None = None,
    config: NumericsConfig = DEFAULT_CONFIG,
) -> ExpectationReport:
    """Evaluate the recorded claims of a fixture.

    Parameters
    ----------
    fixture : Fixture or str
        A fixture or its id in the bundled catalog.
    bindings : mapping, optional
        Parameter values; defaults fill the rest and solved parameters are
        closed first.
    checks : iterable of str, optional
        Subset of :data:`CHECKS`; all by default.
    config : NumericsConfig

    Raises
    ------
    ValueError
        For an unknown check name or invalid bindings.
    NumericalFailure
        If period closing or a quadrature fails.
    """
    fx = find(fixture) if isinstance(fixture, str) else fixture
    selected = list(CHECKS) if checks is None else list(checks)
    unknown = set(selected) - set(CHECKS)
    if unknown:
        raise ValueError(f"Unknown check(s) {sorted(unknown)}; expected a subset of {list(CHECKS)}")

    needs_surface = any(fx.expected.get(c) for c in selected)
    values = fx.resolve(bindings, solve=needs_surface, config=config) if needs_surface else fx.bind(bindings)
    ctx = _Context(fx, values, config)
    report = ExpectationReport(fx.id, {n: v for n, v in values.items() if not fx.params[n].solve})
    for check in CHECKS:
        if check not in selected:
            continue
        for claim in fx.expected.get(check, []):
            if not condition_holds(claim.get("where"), values):
                report.results.append(
                    ctx.result(check, claim, json.dumps(claim.get("where"), sort_keys=True), "-", "-", None, "condition not met")
                )
                continue
            results = _CHECKERS[check](ctx, claim)
            for r in results:
                log = logger.debug if r.passed else logger.warning
                log(f"{fx.label(values)}: {r.check} {r.claim}: expected {r.expected}, observed {r.observed}")
            report.results.extend(results)
    return report


__all__ = [
    "CHEAP_CHECKS",
    "CHECKS",
    "CURVATURE_RTOL",
    "ClaimResult",
    "ExpectationReport",
    "run_expectations",
]
