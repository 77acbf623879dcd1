"""Command-line front end.

.. code-block:: bash

    hsurf list
    hsurf info hyperbolic-paraboloid
    hsurf classify --form "1, i, 1/z" --puncture 0 --puncture inf
    hsurf classify --form "(z+0.45)/w, i*(z-0.45)/w, 1" --domain "w^2 = z^3 - z" --puncture inf
    hsurf curvature catenoid
    hsurf close-periods torus-223
    hsurf mesh cusp-k --param k=3 --out cusp3.obj
    hsurf check catenoid curvature symmetry
    hsurf report --out ./catalog_run --threads 4

Exit codes: 0 pass, 1 a check failed or the surface is geometrically invalid
(a degenerate triple, a path through a pole), 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from hsurf import __version__
from hsurf.algebra.parser import parse_constant, parse_forms, parse_polynomial
from hsurf.algebra.rational import INFINITY
from hsurf.catalog.expectations import CHEAP_CHECKS, CHECKS, CURVATURE_RTOL, run_expectations
from hsurf.catalog.fixtures import Fixture, expand_points, find, load, parse_point
from hsurf.catalog.runs import CatalogRun
from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.ends.admissibility import admissibility, classification_citation, classify_budget
from hsurf.ends.curvature import total_curvature
from hsurf.ends.types import check_nondegenerate, end_type, format_type
from hsurf.errors import DegenerateTriple, HarmonicSurfaceError, NumericalFailure, SchemaError, UnresolvedParam
from hsurf.evaluation.integrate import integrate_curvature
from hsurf.periods.closing import period_report
from hsurf.surfaces.domains import Domain, SheetPoint
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData, form_pole_order, residues_real_check
from hsurf.verification.mesh import Region, build_mesh
from hsurf.verification.obj import write_obj

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# Option handling
# ---------------------------------------------------------------------------


def _parse_params(items: Sequence[str] | None) -> dict[str, str]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise ValueError(f"--param expects name=value, got {item!r}")
        out[name.strip()] = value.strip()
    return out


def _config(args: argparse.Namespace) -> NumericsConfig:
    overrides: dict[str, Any] = {"seed": args.seed, "threads": args.threads, "cache": args.cache}
    if args.density is not None:
        if args.density < 4:
            raise ValueError(f"--density must be at least 4, got {args.density}")
        overrides["mesh_density"] = args.density
    if args.tol is not None:
        if not args.tol > 0:
            raise ValueError(f"--tol must be positive, got {args.tol}")
        overrides["period_tol"] = args.tol
    if args.threads < 1:
        raise ValueError(f"--threads must be at least 1, got {args.threads}")
    return DEFAULT_CONFIG.replace(**overrides)


class _Target:
    """What a command operates on: a catalog fixture or an inline surface."""

    def __init__(self, args: argparse.Namespace):
        fixture_id = getattr(args, "target", None) or args.fixture
        if fixture_id and args.form:
            raise ValueError("Give either a fixture id or --form, not both")
        self.params = _parse_params(args.param)
        self.region = Region.parse(args.region) if args.region else None
        self.fixture: Fixture | None = None
        self.form_text: str | None = args.form
        if fixture_id:
            self.fixture = find(fixture_id, load(args.catalog))
            self.fixture.bind(self.params)
        elif not args.form:
            raise ValueError("No target: give a fixture id or --form")
        self.domain_text: str | None = args.domain
        self.punctures: list[str] = list(args.puncture or [])
        self._values: dict | None = None

    @property
    def label(self) -> str:
        return self.fixture.id if self.fixture else "inline"

    def values(self, config: NumericsConfig, solve: bool = True) -> dict:
        if self._values is None:
            if self.fixture is None:
                self._values = {k: _real_if_close(parse_constant(v)) for k, v in self.params.items()}
            else:
                self._values = self.fixture.resolve(self.params, solve, config)
        return self._values

    def surface(self, config: NumericsConfig, solve: bool = True) -> SurfaceData:
        if self.fixture is not None:
            return self.fixture.surface(self.values(config, solve))
        return inline_surface(self.form_text or "", self.domain_text, self.punctures, self.values(config))


def _real_if_close(v: complex) -> complex | float:
    return v.real if abs(v.imag) <= 1e-14 * max(1.0, abs(v)) else v


def _parse_domain(text: str | None, params: dict) -> Any:
    if not text:
        return None
    lhs, sep, rhs = text.partition("=")
    if not sep or lhs.replace(" ", "") not in ("w^2", "w**2"):
        raise ValueError(f"--domain must read 'w^2 = p(z)', got {text!r}")
    return parse_polynomial(rhs, params)


def inline_surface(forms: str, domain: str | None, punctures: Sequence[str], params: dict | None = None) -> SurfaceData:
    """Surface from ``--form``, ``--domain`` and ``--puncture`` options.

    On the sphere the punctures default to the poles of the forms; on a
    curve they must be given.
    """
    params = params or {}
    poly = _parse_domain(domain, params)
    exprs = parse_forms(forms, poly, params)
    if len(exprs) != 3:
        raise ValueError(f"--form needs three comma-separated expressions, got {len(exprs)}")
    omega = tuple(MeromorphicForm.from_wexpr(e) for e in exprs)
    pts = [parse_point(p, params) for p in expand_points(punctures, params)]
    if poly is None:
        d = Domain.sphere(pts or _sphere_poles(omega))
    else:
        if not pts:
            raise ValueError("A curve needs its punctures: pass --puncture for each")
        d = Domain.hyperelliptic(poly, pts)
    return SurfaceData(d, omega, label="inline")


def _sphere_poles(omega: Sequence[MeromorphicForm]) -> list[SheetPoint]:
    found: dict[tuple[float, float], complex] = {}
    for f in omega:
        for pole, order in f.a.poles:
            if order <= 0:
                continue
            found.setdefault((round(pole.real, 9), round(pole.imag, 9)), pole)
    pts = [SheetPoint(z) for z in found.values()]
    bare = Domain.sphere()
    if any(form_pole_order(f, bare, SheetPoint(INFINITY)) > 0 for f in omega):
        pts.append(SheetPoint(INFINITY))
    return pts


def _emit(args: argparse.Namespace, data: Any, text: str) -> None:
    print(json.dumps(data, indent=2, sort_keys=True, default=str) if args.json else text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_list(args: argparse.Namespace) -> int:
    catalog = load(args.catalog)
    rows = [{"id": fx.id, "citation": fx.citation, "title": fx.title, "params": sorted(fx.params)} for fx in catalog.values()]
    width = max(len(r["id"]) for r in rows)
    _emit(args, rows, "\n".join(f"{r['id']:<{width}}  {r['citation']}  {r['title']}" for r in rows))
    return EXIT_PASS


def _classification(s: SurfaceData, config: NumericsConfig = DEFAULT_CONFIG) -> dict:
    try:
        check_nondegenerate(s, config=config)
    except DegenerateTriple as exc:
        return {"degenerate": True, "message": str(exc)}
    ends = []
    types = {}
    for p in s.punctures:
        t = end_type(s, p, config)
        types[p] = t
        v = admissibility(t)
        ends.append(
            {
                "puncture": str(p),
                "raw": format_type(t.raw),
                "type": str(t),
                "order": t.order,
                "verdict": v.verdict.value,
                "rule": v.rule,
            }
        )
    budget = total_curvature(s, types)
    out: dict[str, Any] = {
        "degenerate": False,
        "genus": s.genus,
        "ends": ends,
        "total_curvature": str(budget),
        "total_over_2pi": budget.multiple,
    }
    try:
        families = classify_budget(budget.total, s.genus)
        mine = sorted(t.reduced for t in types.values())
        out["classification"] = classification_citation(budget.total, s.genus)
        out["in_classified_family"] = any(sorted(tuple(sorted(t)) for t in fam) == mine for fam in families)
    except ValueError:
        out["classification"] = None
    return out


def _classification_text(c: dict) -> list[str]:
    if c["degenerate"]:
        return [f"degenerate: {c['message']}"]
    lines = [f"genus {c['genus']}"]
    for e in c["ends"]:
        lines.append(f"  end at {e['puncture']}: type {e['type']} (raw {e['raw']}), order {e['order']}, {e['verdict']} {e['rule']}")
    lines.append(f"total curvature {c['total_curvature']}")
    if c.get("classification"):
        match = "matches a listed family" if c["in_classified_family"] else "not a listed family"
        lines.append(f"classification {c['classification']}: {match}")
    return lines


def cmd_classify(args: argparse.Namespace) -> int:
    target = _Target(args)
    config = _config(args)
    c = _classification(target.surface(config), config)
    _emit(args, c, "\n".join(_classification_text(c)))
    return EXIT_FAIL if c["degenerate"] else EXIT_PASS


def cmd_info(args: argparse.Namespace) -> int:
    target = _Target(args)
    config = _config(args)
    s = target.surface(config)
    c = _classification(s, config)
    data: dict[str, Any] = {"target": target.label, "domain": s.domain.kind.value, **c}
    lines = []
    if target.fixture is not None:
        fx = target.fixture
        data.update(title=fx.title, citation=fx.citation, forms=fx.forms, params=target.values(config))
        lines += [f"{fx.id}: {fx.title} {fx.citation}", f"forms ({fx.forms})"]
        if fx.params:
            lines.append("params " + ", ".join(f"{k}={v:.12g}" for k, v in data["params"].items()))
    else:
        lines.append(f"inline forms ({target.form_text})")
    lines.append(f"domain {s.domain.kind.value}, punctures {', '.join(str(p) for p in s.punctures)}")
    lines += _classification_text(c)
    residues = residues_real_check(s, config=config)
    odd = residues[residues["flagged"]]
    data["non_real_residues"] = odd.to_dict(orient="records")
    lines.append(
        "residues real" if odd.empty else "non-real residues: " + ", ".join(f"form {r.form} at {r.puncture}" for r in odd.itertuples())
    )
    _emit(args, data, "\n".join(lines))
    return EXIT_FAIL if c["degenerate"] else EXIT_PASS


def cmd_curvature(args: argparse.Namespace) -> int:
    target = _Target(args)
    config = _config(args)
    s = target.surface(config)
    budget = total_curvature(s)
    value = integrate_curvature(s, config=config)
    rel = abs(value - budget.total) / abs(budget.total) if budget.total else abs(value)
    ok = rel <= CURVATURE_RTOL
    data = {"target": target.label, "budget": str(budget), "budget_value": budget.total, "integral": value, "relative_error": rel, "passed": ok}
    text = (
        f"{target.label}: budget {budget} = {budget.total:.6g}, "
        f"integral {value:.6g} ({value / (2 * math.pi):.4f}·2π), relative error {rel:.2e} "
        f"[{'pass' if ok else 'FAIL'} at {CURVATURE_RTOL:.0%}]"
    )
    _emit(args, data, text)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_close_periods(args: argparse.Namespace) -> int:
    target = _Target(args)
    config = _config(args)
    values = target.values(config)
    s = target.surface(config)
    cycles = target.fixture.period_cycles(values) if target.fixture else None
    report = period_report(s, cycles, config)
    solved = {n: values[n] for n in (target.fixture.free_params if target.fixture else [])}
    ok = not report["flagged"].any()
    data = {"target": target.label, "solved": solved, "periods": report.to_dict(orient="records"), "passed": bool(ok)}
    lines = [f"{n} = {v:.15g}" for n, v in solved.items()]
    lines.append(report.to_string(index=False, float_format=lambda x: f"{x:.3e}"))
    lines.append(f"real periods {'closed' if ok else 'NOT closed'} (tol {config.period_tol:g})")
    _emit(args, data, "\n".join(lines))
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_mesh(args: argparse.Namespace) -> int:
    target = _Target(args)
    config = _config(args)
    s = target.surface(config)
    region = target.region or Region()
    mesh = build_mesh(s, region, config=config)
    out = Path(args.out) if args.out else Path(f"{s.label or target.label}.obj")
    comment = f"hsurf {__version__}: {s.label or target.label}, region {region.r_min:g},{region.r_max:g}, density {config.mesh_density}"
    write_obj(mesh, out, normals=not args.no_normals, comment=comment)
    data = {
        "path": str(out),
        "vertices": mesh.n_vertices,
        "triangles": mesh.n_triangles,
        "boundary_loops": mesh.boundary_loops(),
        "euler_characteristic": mesh.euler_characteristic(),
    }
    text = (
        f"wrote {out}: {data['vertices']} vertices, {data['triangles']} triangles, "
        f"{data['boundary_loops']} boundary loops, Euler characteristic {data['euler_characteristic']}"
    )
    _emit(args, data, text)
    return EXIT_PASS


def cmd_check(args: argparse.Namespace) -> int:
    target = _Target(args)
    if target.fixture is None:
        raise ValueError("check needs a catalog fixture")
    config = _config(args)
    report = run_expectations(target.fixture, target.params, args.which or None, config)
    _emit(args, report.to_dict(), report.to_text())
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_report(args: argparse.Namespace) -> int:
    config = _config(args)
    checks = [c.strip() for c in args.checks.split(",")] if args.checks else None
    if getattr(args, "target", None) or args.fixture:
        target = _Target(args)
        report = run_expectations(target.fixture, target.params, checks, config)
        _emit(args, report.to_dict(), report.to_text())
        return EXIT_PASS if report.passed else EXIT_FAIL

    run = CatalogRun(checks=checks or list(CHEAP_CHECKS), config=config.replace(threads=1), samples=args.samples, catalog_path=args.catalog)
    results = run.run(args.out or "hsurf_report", n_jobs=args.threads, resume=not args.fresh)
    summary = results.summary()
    failed = results.failed()
    _emit(args, summary.to_dict(orient="records"), summary.to_string(index=False))
    return EXIT_PASS if failed.empty else EXIT_FAIL


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--fixture", help="catalog fixture id")
    p.add_argument("--form", help='inline triple, e.g. "1, i, 1/z"')
    p.add_argument("--domain", help='curve for --form, e.g. "w^2 = z(z-1)(z+1)"; the sphere by default')
    p.add_argument("--puncture", action="append", help="puncture for --form: inf, a complex literal, or z@±1 (repeatable)")
    p.add_argument("--param", action="append", metavar="NAME=VALUE", help="parameter binding (repeatable)")
    p.add_argument("--region", metavar="R_MIN,R_MAX", help="truncation for meshes and scans")
    p.add_argument("--density", type=int, help="mesh density")
    p.add_argument("--out", help="output path (OBJ for mesh, results directory for report)")
    p.add_argument("--tol", type=float, help="real-period tolerance")
    p.add_argument("--threads", type=int, default=1, help="worker threads or processes")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled scans")
    p.add_argument("--catalog", help="catalog JSON (bundled catalog by default)")
    p.add_argument("--cache", action="store_true", help="cache period solutions under $HSURF_CACHE_DIR (or the working directory)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="hsurf", description="Harmonic surfaces from meromorphic 1-forms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", parents=[common], help="list catalog fixtures")
    p.set_defaults(func=cmd_list)

    for name, func, help_text in (
        ("info", cmd_info, "fixture summary: ends, types, verdicts, curvature"),
        ("classify", cmd_classify, "end types and admissibility verdicts"),
        ("curvature", cmd_curvature, "curvature budget against the integral of K dA"),
        ("close-periods", cmd_close_periods, "solve free parameters and report real periods"),
        ("mesh", cmd_mesh, "write an OBJ mesh"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("target", nargs="?", help="catalog fixture id")
        if name == "mesh":
            p.add_argument("--no-normals", action="store_true", help="omit vn records")
        p.set_defaults(func=func)

    p = sub.add_parser("check", parents=[common], help="run recorded checks of a fixture")
    p.add_argument("target", help="catalog fixture id")
    p.add_argument("which", nargs="*", help=f"checks to run, from {','.join(CHECKS)} (all by default)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("report", parents=[common], help="expectation report for a fixture or the whole catalog")
    p.add_argument("target", nargs="?", help="catalog fixture id (whole catalog when omitted)")
    p.add_argument("--checks", help=f"comma-separated subset of {','.join(CHECKS)}; catalog runs default to {','.join(CHEAP_CHECKS)}")
    p.add_argument("--samples", action="store_true", help="expand parameter samples in a catalog run")
    p.add_argument("--fresh", action="store_true", help="ignore earlier results in --out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"hsurf: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SchemaError, UnresolvedParam) as exc:
        print(f"hsurf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HarmonicSurfaceError as exc:
        print(f"hsurf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except KeyError as exc:
        print(f"hsurf: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"hsurf: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
