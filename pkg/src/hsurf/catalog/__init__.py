"""Fixture catalog, expectation checks and batch runs."""

from hsurf.catalog.expectations import (
    CHEAP_CHECKS,
    CHECKS,
    ClaimResult,
    ExpectationReport,
    run_expectations,
)
from hsurf.catalog.fixtures import (
    SCHEMA_VERSION,
    Fixture,
    ParamSpec,
    canonical_json,
    dump_catalog,
    find,
    fixture_ids,
    get,
    load,
)
from hsurf.catalog.runs import CatalogResults, CatalogRun

__all__ = [
    "CHEAP_CHECKS",
    "CHECKS",
    "SCHEMA_VERSION",
    "CatalogResults",
    "CatalogRun",
    "ClaimResult",
    "ExpectationReport",
    "Fixture",
    "ParamSpec",
    "canonical_json",
    "dump_catalog",
    "find",
    "fixture_ids",
    "get",
    "load",
    "run_expectations",
]
