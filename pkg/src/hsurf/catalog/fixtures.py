"""Versioned catalog of example surfaces and ends.

Every fixture names a domain, its punctures and a form triple written in the
expression grammar of :mod:`hsurf.algebra.parser`, together with the
properties expected of it. Fixtures may be parametric (``k``-fold families,
end orders ``n``) and may leave real parameters to be solved by period
closing.

Quick start
-----------
.. code-block:: python

    from hsurf.catalog import fixtures

    s = fixtures.get("catenoid")
    s3 = fixtures.get("cusp-k", {"k": 4})
    torus = fixtures.get("torus-223")  # solves l1, l2

Schema (``schema_version`` 1)
-----------------------------
``id``, ``title``, ``citation``
    Identifier and the citation tag the fixture is taken from.
``domain``
    ``{"kind": "sphere"}`` or ``{"kind": "hyperelliptic", "branch_poly":
    [c0, c1, c2, c3], "cuts": [[e1, e2], [e3, "inf"]], "normalization":
    [z0, w0]}``. Coefficients run lowest degree first.
``punctures``
    Point expressions, ``"inf"``, ``"z@+1"`` for a sheet, or
    ``"root_of_unity(k,*)"`` for all ``k``-th roots.
``forms``
    Three comma-separated expressions in ``z`` (and ``w``).
``params``
    ``{name: {"kind": "int"|"real", "default", "range": [lo, hi],
    "samples": [...], "solve": bool}}``.
``solve``
    ``{"free": [{"name", "form", "cycle", "bracket"}], "cycles": [...]}``
    with cycles ``{"interval": [a, b]}``, ``{"loop": p}`` or
    ``{"circle": {"center", "radius", "sheet"}}``.
``expected``
    Claim lists keyed by check name; see :mod:`hsurf.catalog.expectations`.
    Each claim carries a ``citation`` and an optional ``where`` condition.
"""

from __future__ import annotations

import copy
import difflib
import json
import logging
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cache
from importlib.resources import files
from pathlib import Path
from typing import Any

from hsurf.algebra.parser import parse_constant, parse_forms, reserved_names
from hsurf.algebra.polynomials import CPoly
from hsurf.algebra.rational import INFINITY
from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.errors import SchemaError, UnresolvedParam
from hsurf.periods.closing import FreeParam, PeriodProblem, close_periods
from hsurf.periods.cycles import CollapsedInterval, Cycle, ExplicitPath, PunctureLoop
from hsurf.surfaces.domains import Domain, SheetPoint
from hsurf.surfaces.forms import MeromorphicForm, SurfaceData

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CATALOG_FILE = "fixtures.json"

CLAIM_KINDS = (
    "degenerate",
    "types",
    "verdicts",
    "curvature",
    "periods",
    "values",
    "symmetry",
    "regular",
    "embedded",
    "proper",
    "topology",
)

_FIXTURE_KEYS = {"id", "title", "citation", "domain", "punctures", "forms", "params", "solve", "basepoint", "expected", "notes"}
_REQUIRED_KEYS = {"id", "title", "citation", "domain", "punctures", "forms", "expected"}
_PARAM_KEYS = {"kind", "default", "range", "samples", "solve"}
_COMPARATORS = {
    "eq": lambda a, b: abs(a - b) <= 1e-12 * max(1.0, abs(b)),
    "ne": lambda a, b: abs(a - b) > 1e-12 * max(1.0, abs(b)),
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
}
_ALL_ROOTS_RE = re.compile(r"^root_of_unity\(\s*([^,]+?)\s*,\s*\*\s*\)$")

Values = dict[str, float | int]


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamSpec:
    """Declared fixture parameter."""

    name: str
    kind: str = "real"
    default: Any = None
    range: tuple[Any, Any] = (None, None)
    samples: tuple = ()
    solve: bool = False

    @classmethod
    def from_dict(cls, name: str, data: Mapping[str, Any]) -> ParamSpec:
        unknown = set(data) - _PARAM_KEYS
        if unknown:
            raise SchemaError(f"Parameter {name!r} has unknown keys {sorted(unknown)}")
        if name in reserved_names():
            raise SchemaError(f"Parameter name {name!r} is reserved")
        kind = data.get("kind", "real")
        if kind not in ("int", "real"):
            raise SchemaError(f"Parameter {name!r} has kind {kind!r}; expected 'int' or 'real'")
        rng = data.get("range", [None, None])
        if not isinstance(rng, list) or len(rng) != 2:
            raise SchemaError(f"Parameter {name!r} range must be [lo, hi], got {rng!r}")
        return cls(
            name,
            kind,
            data.get("default"),
            (rng[0], rng[1]),
            tuple(data.get("samples", ())),
            bool(data.get("solve", False)),
        )

    def coerce(self, value: Any) -> float | int:
        """Validate ``value`` against the kind and range.

        Raises
        ------
        ValueError
            If the value is not of the declared kind or lies outside the range.
        """
        v = parse_constant(value) if isinstance(value, str) else complex(value)
        if abs(v.imag) > 1e-12:
            raise ValueError(f"Parameter {self.name} must be real, got {value!r}")
        x = v.real
        if self.kind == "int":
            if abs(x - round(x)) > 1e-12:
                raise ValueError(f"Parameter {self.name} must be an integer, got {value!r}")
            x = int(round(x))
        lo, hi = (None if b is None else parse_constant(b).real for b in self.range)
        if (lo is not None and x < lo) or (hi is not None and x > hi):
            raise ValueError(
                f"Parameter {self.name} = {x} lies outside its declared range "
                f"[{'-inf' if lo is None else lo}, {'inf' if hi is None else hi}]"
            )
        return x


# ---------------------------------------------------------------------------
# Expression helpers
# ---------------------------------------------------------------------------


def expand_points(entries: Iterable[str], values: Mapping[str, float | int]) -> list[str]:
    """Expand ``root_of_unity(k,*)`` entries into one entry per root."""
    out = []
    for entry in entries:
        m = _ALL_ROOTS_RE.match(str(entry).strip())
        if m is None:
            out.append(str(entry))
            continue
        k = parse_constant(m.group(1), values).real
        if abs(k - round(k)) > 1e-12 or round(k) < 1:
            raise ValueError(f"{entry!r} needs a positive integer order, got {k}")
        out.extend(f"root_of_unity({int(round(k))},{j})" for j in range(int(round(k))))
    return out


def parse_point(text: str | float | int, values: Mapping[str, float | int] | None = None) -> SheetPoint:
    """``"inf"``, a constant expression, or ``"expr@±1"`` for a sheet."""
    if not isinstance(text, str):
        return SheetPoint(complex(text), 0)
    expr, _, sheet = text.partition("@")
    if expr.strip().lower() in ("inf", "infinity", "∞"):
        return SheetPoint(INFINITY, 0)
    return SheetPoint(parse_constant(expr, values), int(sheet) if sheet else 0)


def _point_value(text: str | float | int, values: Mapping[str, float | int]) -> complex:
    return parse_point(text, values).z


def parse_cycle(spec: Mapping[str, Any], values: Mapping[str, float | int]) -> Cycle:
    """Cycle from its catalog form."""
    if "interval" in spec:
        a, b = (_point_value(x, values) for x in spec["interval"])
        return CollapsedInterval(
            a,
            b,
            both_sheets=bool(spec.get("both_sheets", True)),
            side=int(spec.get("side", 1)),
            orientation=int(spec.get("orientation", 1)),
        )
    if "loop" in spec:
        return PunctureLoop(parse_point(spec["loop"], values), int(spec.get("orientation", 1)))
    if "circle" in spec:
        c = spec["circle"]
        return ExplicitPath.circle(
            _point_value(c["center"], values),
            float(c["radius"]),
            int(c.get("sheet", 0)),
            int(c.get("n", 64)),
        )
    raise SchemaError(f"Unknown cycle {dict(spec)!r}")


def condition_holds(where: Mapping[str, Mapping[str, Any]] | None, values: Mapping[str, float | int]) -> bool:
    """Evaluate a claim's ``where`` condition, e.g. ``{"k": {"ge": 3}}``."""
    for name, tests in (where or {}).items():
        if name not in values:
            raise UnresolvedParam(f"Condition on unbound parameter {name!r}")
        x = values[name]
        for op, ref in tests.items():
            if op not in _COMPARATORS:
                raise SchemaError(f"Unknown comparator {op!r}; expected one of {sorted(_COMPARATORS)}")
            if not _COMPARATORS[op](x, parse_constant(ref, values).real):
                return False
    return True


# ---------------------------------------------------------------------------
# Fixture
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Fixture:
    """One catalog entry; ``raw`` is the mapping it was loaded from."""

    id: str
    title: str
    citation: str
    domain: dict
    punctures: tuple[str, ...]
    forms: str
    params: dict[str, ParamSpec] = field(default_factory=dict)
    expected: dict[str, list[dict]] = field(default_factory=dict)
    solve: dict | None = None
    basepoint: str | None = None
    notes: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Fixture:
        """Validate and wrap one fixture mapping.

        Raises
        ------
        SchemaError
            On missing or unknown keys, a malformed domain, claims of an
            unknown kind, or claims without a citation.
        """
        if not isinstance(data, Mapping):
            raise SchemaError(f"Fixture entries must be objects, got {type(data).__name__}")
        fid = data.get("id", "<missing id>")
        missing = _REQUIRED_KEYS - set(data)
        if missing:
            raise SchemaError(f"Fixture {fid!r} is missing {sorted(missing)}")
        unknown = set(data) - _FIXTURE_KEYS
        if unknown:
            raise SchemaError(f"Fixture {fid!r} has unknown keys {sorted(unknown)}")

        domain = data["domain"]
        kind = domain.get("kind") if isinstance(domain, Mapping) else None
        if kind == "hyperelliptic":
            if len(domain.get("branch_poly", ())) != 4:
                raise SchemaError(f"Fixture {fid!r}: branch_poly must list four coefficients")
        elif kind != "sphere":
            raise SchemaError(f"Fixture {fid!r}: domain kind must be 'sphere' or 'hyperelliptic', got {kind!r}")
        if not isinstance(data["forms"], str) or not isinstance(data["punctures"], list):
            raise SchemaError(f"Fixture {fid!r}: forms must be a string and punctures a list")

        params = {name: ParamSpec.from_dict(name, spec) for name, spec in data.get("params", {}).items()}
        solve = data.get("solve")
        solved = {p.name for p in params.values() if p.solve}
        if solved and (solve is None or {f["name"] for f in solve.get("free", [])} != solved):
            raise SchemaError(f"Fixture {fid!r}: solved parameters {sorted(solved)} need matching 'solve.free' entries")

        expected = data["expected"]
        for claim_kind, claims in expected.items():
            if claim_kind not in CLAIM_KINDS:
                raise SchemaError(f"Fixture {fid!r}: unknown claim kind {claim_kind!r}")
            for claim in claims:
                if not str(claim.get("citation", "")).strip():
                    raise SchemaError(f"Fixture {fid!r}: every {claim_kind} claim needs a citation")

        return cls(
            id=data["id"],
            title=data["title"],
            citation=data["citation"],
            domain=dict(domain),
            punctures=tuple(data["punctures"]),
            forms=data["forms"],
            params=params,
            expected={k: list(v) for k, v in expected.items()},
            solve=solve,
            basepoint=data.get("basepoint"),
            notes=data.get("notes", ""),
            raw=copy.deepcopy(dict(data)),
        )

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)

    # --- Parameters ---

    @property
    def free_params(self) -> list[str]:
        return [p.name for p in self.params.values() if p.solve]

    def bind(self, bindings: Mapping[str, Any] | None = None) -> Values:
        """Declared parameters with defaults filled in and values validated.

        Solved parameters are included only when bound explicitly.

        Raises
        ------
        ValueError
            For unknown names or values outside a declared range.
        UnresolvedParam
            For a parameter without a default that is not bound.
        """
        bindings = dict(bindings or {})
        unknown = set(bindings) - set(self.params)
        if unknown:
            raise ValueError(f"Fixture {self.id!r} has no parameter(s) {sorted(unknown)}; declared: {sorted(self.params)}")
        values: Values = {}
        for name, spec in self.params.items():
            if name in bindings:
                values[name] = spec.coerce(bindings[name])
            elif spec.solve:
                continue
            elif spec.default is None:
                raise UnresolvedParam(f"Fixture {self.id!r} needs a value for {name!r}")
            else:
                values[name] = spec.coerce(spec.default)
        return values

    def resolve(
        self,
        bindings: Mapping[str, Any] | None = None,
        solve: bool = True,
        config: NumericsConfig = DEFAULT_CONFIG,
    ) -> Values:
        """Bound values including the solved parameters.

        Raises
        ------
        UnresolvedParam
            If a parameter is left to period closing and ``solve`` is False.
        """
        values = self.bind(bindings)
        pending = [n for n in self.free_params if n not in values]
        if not pending:
            return values
        if not solve:
            raise UnresolvedParam(f"Fixture {self.id!r}: {', '.join(pending)} must be solved (pass solve=True or bind them)")
        values.update(self.solve_periods(values, config))
        return values

    def samples(self) -> list[Values]:
        """Cartesian product of the declared sample values (defaults elsewhere)."""
        grids: list[list[tuple[str, Any]]] = []
        for name, spec in self.params.items():
            if spec.solve:
                continue
            options = spec.samples or ((spec.default,) if spec.default is not None else ())
            grids.append([(name, v) for v in options])
        combos: list[Values] = [{}]
        for grid in grids:
            combos = [{**c, name: v} for c in combos for name, v in grid]
        return [self.bind(c) for c in combos]

    # --- Construction ---

    def build_domain(self, values: Mapping[str, float | int]) -> Domain:
        pts = [parse_point(p, values) for p in expand_points(self.punctures, values)]
        if self.domain["kind"] == "sphere":
            return Domain.sphere(pts)
        poly = CPoly([parse_constant(c, values) for c in self.domain["branch_poly"]])
        cuts = None
        if "cuts" in self.domain:
            cuts = tuple(tuple(_point_value(v, values) for v in cut) for cut in self.domain["cuts"])
        normalization = None
        if "normalization" in self.domain:
            z0, w0 = self.domain["normalization"]
            normalization = (parse_constant(z0, values), parse_constant(w0, values))
        return Domain.hyperelliptic(
            poly,
            pts,
            cuts=cuts,
            ray_direction=parse_constant(self.domain.get("ray_direction", 1), values),
            normalization=normalization,
        )

    def label(self, values: Mapping[str, float | int]) -> str:
        shown = {n: v for n, v in values.items() if not self.params[n].solve}
        if not shown:
            return self.id
        return f"{self.id}[{','.join(f'{n}={v:g}' for n, v in shown.items())}]"

    def surface(self, values: Mapping[str, float | int]) -> SurfaceData:
        """Instantiate the surface at fully resolved ``values``."""
        domain = self.build_domain(values)
        exprs = parse_forms(self.forms, domain.branch_poly, values)
        if len(exprs) != 3:
            raise SchemaError(f"Fixture {self.id!r} must give three forms, got {len(exprs)}")
        omega = tuple(MeromorphicForm.from_wexpr(e) for e in exprs)
        base = None if self.basepoint is None else parse_point(self.basepoint, values)
        return SurfaceData(domain, omega, base, self.label(values))

    # --- Period closing ---

    def period_cycles(self, values: Mapping[str, float | int]) -> list[Cycle]:
        return [parse_cycle(c, values) for c in (self.solve or {}).get("cycles", [])]

    def solve_periods(self, values: Mapping[str, float | int], config: NumericsConfig = DEFAULT_CONFIG) -> Values:
        """Close the periods for every unbound solved parameter."""
        free = [
            FreeParam(f["name"], int(f["form"]), parse_cycle(f["cycle"], values), tuple(float(b) for b in f["bracket"]))
            for f in self.solve["free"]
            if f["name"] not in values
        ]
        fixed = dict(values)

        def template(lam: Mapping[str, float]) -> SurfaceData:
            return self.surface({**fixed, **lam})

        problem = PeriodProblem.from_surface_template(template, free, self.period_cycles(values), seed=config.seed)
        key = {"fixture": self.id, "bindings": dict(sorted(fixed.items()))}
        solution = close_periods(problem, config, cache_key=key)
        out = {fp.name: lam for fp, lam in zip(free, solution, strict=True)}
        logger.info(f"{self.label(values)}: solved {', '.join(f'{n} = {v:.12g}' for n, v in out.items())}")
        return out

    def punctures_for(self, s: SurfaceData, text: str, values: Mapping[str, float | int]) -> list[SheetPoint]:
        """Punctures of ``s`` named by a claim's ``puncture`` entry."""
        out = []
        for entry in expand_points([text], values):
            target = parse_point(entry, values)
            match = _nearest_puncture(s, target)
            if match is None:
                raise ValueError(f"{entry!r} is not a puncture of {s.label or self.id}")
            out.append(match)
        return out


def _nearest_puncture(s: SurfaceData, target: SheetPoint) -> SheetPoint | None:
    for p in s.punctures:
        if p.is_infinity or target.is_infinity:
            if p.is_infinity and target.is_infinity:
                return p
        elif abs(p.z - target.z) < 1e-9 and (target.sheet in (0, p.sheet)):
            return p
    return None


# ---------------------------------------------------------------------------
# Catalog I/O
# ---------------------------------------------------------------------------


def canonical_json(data: Any) -> str:
    """Sorted keys, two-space indent and a trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def parse_catalog(data: Mapping[str, Any]) -> dict[str, Fixture]:
    if not isinstance(data, Mapping) or "fixtures" not in data:
        raise SchemaError("A catalog is an object with 'schema_version' and 'fixtures'")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"Unsupported catalog schema_version {version!r}; expected {SCHEMA_VERSION}")
    out: dict[str, Fixture] = {}
    for entry in data["fixtures"]:
        fx = Fixture.from_dict(entry)
        if fx.id in out:
            raise SchemaError(f"Duplicate fixture id {fx.id!r}")
        out[fx.id] = fx
    return out


@cache
def _bundled() -> dict[str, Fixture]:
    text = files("hsurf.catalog").joinpath(CATALOG_FILE).read_text(encoding="utf-8")
    return parse_catalog(json.loads(text))


def load(path: str | Path | None = None) -> dict[str, Fixture]:
    """Load a catalog; the bundled one when ``path`` is None.

    Raises
    ------
    SchemaError
        If the file is not valid catalog JSON.
    """
    if path is None:
        return _bundled()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    return parse_catalog(data)


def dump_catalog(catalog: Mapping[str, Fixture] | Iterable[Fixture], path: str | Path | None = None) -> str:
    """Serialise fixtures as canonical JSON, writing to ``path`` when given."""
    fixtures = list(catalog.values()) if isinstance(catalog, Mapping) else list(catalog)
    text = canonical_json({"schema_version": SCHEMA_VERSION, "fixtures": [fx.to_dict() for fx in fixtures]})
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def fixture_ids(catalog: Mapping[str, Fixture] | None = None) -> list[str]:
    return list((catalog if catalog is not None else load()).keys())


def find(fixture_id: str, catalog: Mapping[str, Fixture] | None = None) -> Fixture:
    """Fixture by id.

    Raises
    ------
    KeyError
        With the closest ids when ``fixture_id`` is unknown.
    """
    catalog = catalog if catalog is not None else load()
    if fixture_id not in catalog:
        close = difflib.get_close_matches(fixture_id, list(catalog), n=3)
        hint = f"; did you mean {', '.join(close)}?" if close else ""
        raise KeyError(f"Unknown fixture {fixture_id!r}{hint}")
    return catalog[fixture_id]


def get(
    fixture_id: str,
    bindings: Mapping[str, Any] | None = None,
    solve: bool = True,
    config: NumericsConfig = DEFAULT_CONFIG,
    catalog: Mapping[str, Fixture] | None = None,
) -> SurfaceData:
    """Instantiate a fixture.

    Parameters
    ----------
    fixture_id : str
    bindings : mapping, optional
        Parameter values; declared defaults fill the rest.
    solve : bool
        Close the periods for parameters left unbound. With False an unbound
        solved parameter raises :class:`UnresolvedParam`.
    config : NumericsConfig
    catalog : mapping, optional
        Defaults to the bundled catalog.
    """
    fx = find(fixture_id, catalog)
    return fx.surface(fx.resolve(bindings, solve, config))


__all__ = [
    "CATALOG_FILE",
    "CLAIM_KINDS",
    "SCHEMA_VERSION",
    "Fixture",
    "ParamSpec",
    "canonical_json",
    "condition_holds",
    "dump_catalog",
    "expand_points",
    "find",
    "fixture_ids",
    "get",
    "load",
    "parse_catalog",
    "parse_cycle",
    "parse_point",
]
