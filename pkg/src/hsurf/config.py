"""Numerical configuration for hsurf computations."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any

from hsurf import get_cache_dir
from hsurf import tolerances as tol

# Default scan parameters
# Notes:
# - `threshold` in regularity is on ν = |f_x × f_y| / |φ|², which is scale free
#   (0 ≤ ν ≤ 1); candidates below it are refined by local minimisation.
# - `radius_factor` in injectivity multiplies the local mesh edge length to get
#   the image-space coincidence radius.
# - properness circles shrink geometrically by `shrink` from `r_start`; an end
#   escapes when min |f| grows against log(1/r) with slope above `slope_tol`.
DEFAULT_SCAN_CONFIG = {
    "regularity": {
        "threshold": 1e-3,
        "singular_tol": 1e-8,
        "merge_distance": 1e-3,
        "max_witnesses": 50,
    },
    "injectivity": {
        "radius_factor": 0.5,
        "min_param_distance": 0.1,
        "max_candidates": 2000,
        "max_witnesses": 50,
    },
    "properness": {
        "r_start": 0.5,
        "shrink": 0.5,
        "n_circles": 20,
        "n_theta": 720,
        "slope_tol": 0.05,
    },
    "symmetry": {
        "n_samples": 64,
        "tol": tol.SYMMETRY_TOL,
    },
    "self_intersection": {
        "leaf_size": tol.BVH_LEAF_SIZE,
        "eps": tol.MOLLER_EPS,
        "max_witnesses": 50,
    },
}


def get_scan_configs(config: dict) -> dict[str, dict]:
    """Build per-scan settings from a config dict, merging with defaults."""
    merged = {}
    for name, default_params in DEFAULT_SCAN_CONFIG.items():
        merged[name] = {**default_params, **(config.get(name, {}))}
    return merged


@dataclass
class NumericsConfig:
    # --- End typing ---
    dependence_tol: float = tol.DEPENDENCE_TOL

    # --- Periods ---
    residue_imag_tol: float = tol.RESIDUE_IMAG_TOL
    period_tol: float = tol.PERIOD_TOL
    quad_epsabs: float = tol.QUAD_EPSABS
    quad_epsrel: float = tol.QUAD_EPSREL
    quad_limit: int = tol.QUAD_LIMIT
    bisect_xtol: float = tol.BISECT_XTOL

    # --- Evaluation ---
    reg_tol: float = tol.REG_TOL
    dodge_tol: float = tol.DODGE_TOL

    # --- Curvature integration ---
    annulus_ratio: float = tol.ANNULUS_RATIO
    inner_radius: float = tol.INNER_RADIUS
    outer_radius: float = tol.OUTER_RADIUS
    angular_density: int = 64
    curvature_rtol: float = 0.005  # successive refinements must agree to 0.5 %
    max_refinements: int = 3

    # --- Meshes and scans ---
    mesh_density: int = 48
    seed: int = 0
    scan_config: dict = field(default_factory=dict)

    # --- Execution (not part of config_id) ---
    threads: int = 1
    cache: bool | str | Path = False

    @cached_property
    def scans(self) -> dict[str, dict]:
        """Per-scan settings (merges ``scan_config`` with defaults)."""
        return get_scan_configs(self.scan_config)

    @property
    def cache_dir(self) -> Path | None:
        """Resolved cache directory, or None when caching is off.

        ``cache=True`` uses ``$HSURF_CACHE_DIR``, falling back to the working
        directory.
        """
        if not self.cache:
            return None
        if self.cache is True:
            try:
                return get_cache_dir()
            except OSError:
                return Path.cwd()
        return Path(self.cache)

    def replace(self, **overrides: Any) -> NumericsConfig:
        """Return a copy with *overrides* applied."""
        return dataclasses.replace(self, **overrides)


DEFAULT_CONFIG = NumericsConfig()

# Fields excluded from config_id (execution only)
_NON_SCIENTIFIC_FIELDS = frozenset({"threads", "cache"})


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------


def _to_json(v: Any) -> Any:
    """Recursively convert a value to a JSON-serializable form."""
    if isinstance(v, (str, int, float, bool, type(None))):
        return v
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_to_json(i) for i in v]
    if isinstance(v, dict):
        return {str(k): _to_json(vv) for k, vv in sorted(v.items())}
    return str(v)


def config_id(config: NumericsConfig) -> str:
    """Return a stable 16-char hex identifier for a config.

    Excludes execution-only fields (threads, cache) so that changing only
    where or how fast things run does not produce a new ID.
    """
    fields = {
        f.name: getattr(config, f.name)
        for f in dataclasses.fields(config)
        if f.name not in _NON_SCIENTIFIC_FIELDS
    }
    serialized = json.dumps(_to_json(fields), sort_keys=True)
    return hashlib.sha256(serialized.encode()).hexdigest()[:16]


def content_hash(data: Any) -> str:
    """Return the first 12 hex chars of sha256 over JSON-normalised *data*."""
    serialized = json.dumps(_to_json(data), sort_keys=True)
    return hashlib.sha256(serialized.encode()).hexdigest()[:12]
