"""Tests for hsurf.catalog.fixtures."""

import copy
import json

import pytest

from hsurf.algebra.rational import INFINITY
from hsurf.catalog.fixtures import (
    SCHEMA_VERSION,
    Fixture,
    condition_holds,
    dump_catalog,
    expand_points,
    find,
    fixture_ids,
    get,
    load,
    parse_catalog,
    parse_cycle,
    parse_point,
)
from hsurf.ends.admissibility import load_manifest
from hsurf.errors import SchemaError, UnresolvedParam
from hsurf.periods.cycles import CollapsedInterval, ExplicitPath, PunctureLoop
from hsurf.surfaces.domains import SheetPoint

CATENOID = "(1/z^2 - 1)/2, i*(1/z^2 + 1)/2, 1/z"

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _make_entry(**overrides) -> dict:
    entry = {
        "id": "custom",
        "title": "Custom catenoid",
        "citation": "[test]",
        "domain": {"kind": "sphere"},
        "punctures": ["0", "inf"],
        "forms": CATENOID,
        "expected": {"types": [{"puncture": "0", "reduced": [1, 2, 2], "citation": "[test]"}]},
    }
    entry.update(overrides)
    return entry


def _make_catalog(*entries) -> dict:
    return {"schema_version": SCHEMA_VERSION, "fixtures": list(entries) or [_make_entry()]}


# ---------------------------------------------------------------------------
# Bundled catalog
# ---------------------------------------------------------------------------


class TestBundledCatalog:
    def test_required_fixtures_present(self):
        ids = set(fixture_ids())
        missing = set(load_manifest()["required_fixtures"]) - ids
        assert not missing

    def test_ids_are_unique(self):
        ids = fixture_ids()
        assert len(ids) == len(set(ids))

    def test_every_claim_cited(self):
        for fx in load().values():
            assert fx.citation.startswith("[")
            for claims in fx.expected.values():
                assert all(c["citation"].strip() for c in claims)

    def test_every_fixture_has_types(self):
        for fx in load().values():
            assert fx.expected.get("types") or fx.expected.get("degenerate"), fx.id

    def test_canonical_round_trip(self, tmp_path):
        path = tmp_path / "catalog.json"
        text = dump_catalog(load(), path)
        assert path.read_text(encoding="utf-8") == text
        again = load(path)
        assert list(again) == fixture_ids()
        assert dump_catalog(again) == text
        assert json.loads(text)["schema_version"] == SCHEMA_VERSION

    def test_find_suggests(self):
        with pytest.raises(KeyError, match="did you mean catenoid"):
            find("catenod")


# ---------------------------------------------------------------------------
# Schema validation
# ---------------------------------------------------------------------------


class TestSchema:
    def test_minimal_entry(self):
        catalog = parse_catalog(_make_catalog())
        assert list(catalog) == ["custom"]
        assert catalog["custom"].to_dict() == _make_entry()

    def test_missing_key(self):
        entry = _make_entry()
        del entry["forms"]
        with pytest.raises(SchemaError, match="missing"):
            parse_catalog(_make_catalog(entry))

    def test_unknown_key(self):
        with pytest.raises(SchemaError, match="unknown keys"):
            parse_catalog(_make_catalog(_make_entry(colour="red")))

    def test_bad_version(self):
        data = _make_catalog()
        data["schema_version"] = 2
        with pytest.raises(SchemaError, match="schema_version"):
            parse_catalog(data)

    def test_not_a_catalog(self):
        with pytest.raises(SchemaError, match="'fixtures'"):
            parse_catalog([])

    def test_duplicate_id(self):
        with pytest.raises(SchemaError, match="Duplicate"):
            parse_catalog(_make_catalog(_make_entry(), _make_entry()))

    def test_bad_domain(self):
        with pytest.raises(SchemaError, match="domain kind"):
            parse_catalog(_make_catalog(_make_entry(domain={"kind": "torus"})))

    def test_branch_poly_length(self):
        domain = {"kind": "hyperelliptic", "branch_poly": [0, -1, 1]}
        with pytest.raises(SchemaError, match="four coefficients"):
            parse_catalog(_make_catalog(_make_entry(domain=domain)))

    def test_unknown_claim_kind(self):
        with pytest.raises(SchemaError, match="unknown claim kind"):
            parse_catalog(_make_catalog(_make_entry(expected={"colour": [{"citation": "[x]"}]})))

    def test_uncited_claim(self):
        expected = {"types": [{"puncture": "0", "reduced": [1, 2, 2]}]}
        with pytest.raises(SchemaError, match="citation"):
            parse_catalog(_make_catalog(_make_entry(expected=expected)))

    def test_solved_param_needs_solve_entry(self):
        params = {"l": {"kind": "real", "solve": True}}
        with pytest.raises(SchemaError, match="solve.free"):
            parse_catalog(_make_catalog(_make_entry(params=params)))

    @pytest.mark.parametrize(
        "spec, match",
        [
            ({"kind": "complex"}, "kind"),
            ({"range": [1]}, "range"),
            ({"step": 1}, "unknown keys"),
        ],
    )
    def test_bad_param(self, spec, match):
        with pytest.raises(SchemaError, match=match):
            parse_catalog(_make_catalog(_make_entry(params={"k": spec})))

    def test_reserved_param_name(self):
        with pytest.raises(SchemaError, match="reserved"):
            parse_catalog(_make_catalog(_make_entry(params={"z": {"default": 1}})))

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        with pytest.raises(SchemaError, match="invalid JSON"):
            load(path)


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


class TestParameters:
    def _make_fixture(self, **spec) -> Fixture:
        params = {"k": {"kind": "int", "range": [3, None], **spec}}
        forms = "(z^(k-2) + 1)/(z^k - 1), i*(z^(k-2) - 1)/(z^k - 1), 1/z"
        entry = _make_entry(params=params, forms=forms, punctures=["0", "root_of_unity(k,*)", "inf"])
        return Fixture.from_dict(entry)

    def test_default(self):
        assert self._make_fixture(default=3).bind() == {"k": 3}

    def test_unbound_without_default(self):
        with pytest.raises(UnresolvedParam, match="needs a value for 'k'"):
            self._make_fixture().bind()

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="outside its declared range"):
            self._make_fixture(default=3).bind({"k": 2})

    def test_not_an_integer(self):
        with pytest.raises(ValueError, match="integer"):
            self._make_fixture(default=3).bind({"k": 3.5})

    def test_unknown_binding(self):
        with pytest.raises(ValueError, match="no parameter"):
            self._make_fixture(default=3).bind({"n": 4})

    def test_expression_binding(self):
        assert self._make_fixture(default=3).bind({"k": "2+2"}) == {"k": 4}

    def test_samples(self):
        fx = self._make_fixture(default=3, samples=[3, 4, 6])
        assert fx.samples() == [{"k": 3}, {"k": 4}, {"k": 6}]

    def test_surface_expands_roots(self):
        fx = self._make_fixture(default=3)
        s = fx.surface(fx.bind({"k": 4}))
        assert len(s.punctures) == 6
        assert s.label == "custom[k=4]"

    def test_solved_params_need_solve(self):
        with pytest.raises(UnresolvedParam, match="must be solved"):
            find("torus-223").resolve(solve=False)


# ---------------------------------------------------------------------------
# Expression helpers
# ---------------------------------------------------------------------------


class TestHelpers:
    def test_expand_points(self):
        out = expand_points(["0", "root_of_unity(k, *)"], {"k": 3})
        assert out == ["0", "root_of_unity(3,0)", "root_of_unity(3,1)", "root_of_unity(3,2)"]

    def test_expand_points_bad_order(self):
        with pytest.raises(ValueError, match="positive integer"):
            expand_points(["root_of_unity(0,*)"], {})

    def test_parse_point(self):
        assert parse_point("inf") == SheetPoint(INFINITY)
        p = parse_point("sqrt(3)@-1")
        assert p.z == pytest.approx(3**0.5)
        assert p.sheet == -1
        assert parse_point(1.5) == SheetPoint(1.5 + 0j)

    def test_parse_cycle(self):
        assert isinstance(parse_cycle({"interval": ["-1", "0"]}, {}), CollapsedInterval)
        assert parse_cycle({"loop": "0"}, {}) == PunctureLoop(SheetPoint(0j))
        circle = parse_cycle({"circle": {"center": "-0.5", "radius": 0.9, "sheet": 1}}, {})
        assert isinstance(circle, ExplicitPath)
        assert circle.points[0].sheet == 1
        with pytest.raises(SchemaError, match="Unknown cycle"):
            parse_cycle({"ring": 1}, {})

    def test_condition_holds(self):
        assert condition_holds({"k": {"ge": 3, "lt": 5}}, {"k": 4})
        assert not condition_holds({"k": {"eq": "2+1"}}, {"k": 4})
        assert condition_holds(None, {})

    def test_condition_errors(self):
        with pytest.raises(UnresolvedParam):
            condition_holds({"n": {"ge": 1}}, {"k": 3})
        with pytest.raises(SchemaError, match="comparator"):
            condition_holds({"k": {"approx": 1}}, {"k": 3})


class TestGet:
    def test_catenoid(self):
        s = get("catenoid")
        assert s.label == "catenoid"
        assert s.punctures == (SheetPoint(0j), SheetPoint(INFINITY))

    def test_custom_catalog(self):
        catalog = parse_catalog(_make_catalog(copy.deepcopy(_make_entry())))
        assert get("custom", catalog=catalog).label == "custom"
