"""Batch expectation runs over the catalog.

Run the recorded claims of many fixtures and parameter samples in one pass,
appending one summary row per run to a results CSV and one JSON report per
run, so an interrupted batch resumes where it stopped.

Quick start
-----------
.. code-block:: python

    from hsurf.catalog.runs import CatalogRun

    run = CatalogRun(checks=["types", "verdicts", "curvature"])
    results = run.run(results_dir="./catalog_run", n_jobs=4)
    results.failed()
    results.summary()
"""

from __future__ import annotations

import json
import logging
import time
import traceback
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import pandas as pd
from joblib import Parallel, delayed

from hsurf.catalog.expectations import CHECKS, run_expectations
from hsurf.catalog.fixtures import Fixture, find, load
from hsurf.config import DEFAULT_CONFIG, NumericsConfig, config_id, content_hash

logger = logging.getLogger(__name__)

RESULTS_FILE = "catalog_results.csv"
GRID_FILE = "catalog_grid.json"
REPORTS_DIR = "reports"

_ROW_COLUMNS = [
    "run_id",
    "fixture",
    "bindings",
    "config_id",
    "passed",
    "n_claims",
    "n_passed",
    "n_failed",
    "n_skipped",
    "failed_claims",
    "runtime_seconds",
    "error",
]


def run_id(fixture_id: str, bindings: Mapping[str, Any], config: NumericsConfig, checks: Sequence[str]) -> str:
    """Stable identifier of one fixture/bindings/config/checks combination."""
    return content_hash({"fixture": fixture_id, "bindings": dict(bindings), "config": config_id(config), "checks": list(checks)})


class CatalogRun:
    """Expectation runs over fixtures and their parameter samples.

    Parameters
    ----------
    fixtures : sequence of str, optional
        Fixture ids; all catalog fixtures by default.
    checks : sequence of str, optional
        Checks to run; all by default.
    config : NumericsConfig
    samples : bool
        Expand every fixture over its declared parameter samples; otherwise
        only the defaults run.
    catalog_path : path, optional
        Catalog file; the bundled catalog by default.
    """

    def __init__(
        self,
        fixtures: Sequence[str] | None = None,
        checks: Sequence[str] | None = None,
        config: NumericsConfig = DEFAULT_CONFIG,
        samples: bool = True,
        catalog_path: str | Path | None = None,
    ):
        self.catalog = load(catalog_path)
        self.checks = list(checks) if checks is not None else list(CHECKS)
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"Unknown check(s) {sorted(unknown)}; expected a subset of {list(CHECKS)}")
        self.config = config
        ids = list(fixtures) if fixtures is not None else list(self.catalog)

        self.runs: list[tuple[str, dict]] = []
        seen: set[str] = set()
        for fid in ids:
            fx = find(fid, self.catalog)
            for values in fx.samples() if samples else [fx.bind()]:
                rid = run_id(fid, values, config, self.checks)
                if rid not in seen:
                    self.runs.append((fid, values))
                    seen.add(rid)

        if not self.runs:
            raise ValueError("No fixtures to run.")
        print(f"Catalog run initialized with {len(self.runs)} runs over {len(ids)} fixtures")

    def run(
        self,
        results_dir: str | Path,
        n_jobs: int = 1,
        resume: bool = True,
        run_ids: Iterable[str] | None = None,
    ) -> CatalogResults:
        """Run the pending expectation checks.

        Parameters
        ----------
        results_dir :
            Directory for the results CSV, the run grid and per-run reports.
        n_jobs :
            Number of parallel workers (0 = write grid only, no runs).
        resume :
            Skip runs already in the results CSV.
        run_ids :
            Optional subset of run ids to execute.
        """
        results_dir = Path(results_dir)
        (results_dir / REPORTS_DIR).mkdir(parents=True, exist_ok=True)
        csv_path = results_dir / RESULTS_FILE
        self._write_grid(results_dir / GRID_FILE)

        if n_jobs == 0:
            print("n_jobs=0: grid written, no runs executed.")
            return CatalogResults(csv_path)

        done: set[str] = set()
        if resume and csv_path.exists():
            existing = pd.read_csv(csv_path)
            if "run_id" in existing.columns:
                done = set(existing["run_id"].dropna().astype(str))
            skipped = sum(1 for fid, v in self.runs if self._id(fid, v) in done)
            print(f"Resuming: {skipped} already done, {len(self.runs) - skipped} remaining.")

        targets = set(run_ids) if run_ids is not None else None
        pending = [
            (fid, values, str(results_dir))
            for fid, values in self.runs
            if self._id(fid, values) not in done and (targets is None or self._id(fid, values) in targets)
        ]
        if not pending:
            print("All runs already completed.")
            return CatalogResults(csv_path)

        if n_jobs == 1:
            print("Running catalog sequentially (n_jobs=1)...")
            try:
                from tqdm import tqdm

                iterator = tqdm(pending, desc="Catalog", unit="run")
            except ImportError:
                iterator = iter(pending)
            for args in iterator:
                self._append_row(csv_path, self._run_single(args))
        else:
            print(f"Running catalog in parallel (n_jobs={n_jobs}). Check errors.log for failures.")
            rows = Parallel(n_jobs=n_jobs, backend="loky", return_as="generator")(
                delayed(self._run_single)(args) for args in pending
            )
            try:
                from tqdm import tqdm

                rows = tqdm(rows, total=len(pending), desc="Catalog", unit="run")
            except ImportError:
                pass
            for row in rows:
                self._append_row(csv_path, row)

        print(f"Catalog run complete. Results at {csv_path}")
        return CatalogResults(csv_path)

    def _id(self, fixture_id: str, values: Mapping[str, Any]) -> str:
        return run_id(fixture_id, values, self.config, self.checks)

    def _run_single(self, args: tuple[str, dict, str]) -> dict[str, Any]:
        """Run one fixture and return its summary row.

        Catches all exceptions so a single failed run does not abort the batch.
        """
        fid, values, results_dir = args
        rid = self._id(fid, values)
        start = time.perf_counter()
        try:
            report = run_expectations(self.catalog[fid], values, self.checks, self.config)
            (Path(results_dir) / REPORTS_DIR / f"{rid}.json").write_text(report.to_json(), encoding="utf-8")
            return {
                "run_id": rid,
                "fixture": fid,
                "bindings": json.dumps(values, sort_keys=True),
                "config_id": config_id(self.config),
                "passed": report.passed,
                **report.counts(),
                "failed_claims": json.dumps([f"{r.check}: {r.claim}" for r in report.failed()]),
                "runtime_seconds": round(time.perf_counter() - start, 3),
                "error": None,
            }
        except Exception as exc:
            tb = traceback.format_exc()
            with open(Path(results_dir) / "errors.log", "a") as f:
                f.write(f"\n{'=' * 60}\n")
                f.write(f"Run: {rid} ({fid} {json.dumps(values, sort_keys=True)})\n")
                f.write(f"Error: {exc}\n")
                f.write(tb)
            logger.error(f"[{rid}] {fid} failed: {exc}")
            row: dict[str, Any] = dict.fromkeys(_ROW_COLUMNS)
            row.update(
                run_id=rid,
                fixture=fid,
                bindings=json.dumps(values, sort_keys=True),
                config_id=config_id(self.config),
                passed=False,
                error=f"{type(exc).__name__}: {exc}",
            )
            return row

    @staticmethod
    def _append_row(csv_path: Path, row: dict | None) -> None:
        if row is None:
            return
        pd.DataFrame([row], columns=_ROW_COLUMNS).to_csv(csv_path, mode="a", header=not csv_path.exists(), index=False)

    def _write_grid(self, path: Path) -> None:
        grid = [
            {"index": i, "run_id": self._id(fid, values), "fixture": fid, "bindings": values}
            for i, (fid, values) in enumerate(self.runs)
        ]
        with open(path, "w") as f:
            json.dump({"checks": self.checks, "config_id": config_id(self.config), "runs": grid}, f, indent=2)

    def fixture(self, fixture_id: str) -> Fixture:
        return find(fixture_id, self.catalog)

    def __len__(self) -> int:
        return len(self.runs)

    def __repr__(self) -> str:
        return f"CatalogRun({len(self)} runs, checks={','.join(self.checks)})"


class CatalogResults:
    """Results CSV of a :class:`CatalogRun`."""

    def __init__(self, csv_path: str | Path):
        self.csv_path = Path(csv_path)

    @property
    def df(self) -> pd.DataFrame:
        if not self.csv_path.exists():
            return pd.DataFrame(columns=_ROW_COLUMNS)
        return pd.read_csv(self.csv_path)

    def failed(self) -> pd.DataFrame:
        """Runs with a failed claim or an error."""
        df = self.df
        return df[(df["passed"].astype(str) != "True") | df["error"].notna()]

    def errors(self) -> pd.DataFrame:
        df = self.df
        return df[df["error"].notna()]

    def summary(self) -> pd.DataFrame:
        """Per-fixture counts of runs, passes and failed claims."""
        df = self.df
        if df.empty:
            return pd.DataFrame(columns=["fixture", "runs", "passed", "n_failed", "errors"])
        df = df.assign(ok=df["passed"].astype(str) == "True", has_error=df["error"].notna())
        return (
            df.groupby("fixture")
            .agg(runs=("run_id", "size"), passed=("ok", "sum"), n_failed=("n_failed", "sum"), errors=("has_error", "sum"))
            .reset_index()
        )

    def report(self, run_id: str) -> dict:
        """Full expectation report of one run."""
        path = self.csv_path.parent / REPORTS_DIR / f"{run_id}.json"
        if not path.exists():
            raise KeyError(f"No report for run {run_id!r} under {path.parent}")
        return json.loads(path.read_text(encoding="utf-8"))

    def __len__(self) -> int:
        return len(self.df)

    def __repr__(self) -> str:
        return f"CatalogResults({self.csv_path}, {len(self)} runs)"


__all__ = ["CatalogResults", "CatalogRun", "run_id"]
