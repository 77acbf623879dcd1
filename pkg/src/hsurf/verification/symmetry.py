"""Symmetries ``f ∘ σ = A f + b`` of a surface."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.errors import HarmonicSurfaceError
from hsurf.evaluation.evaluate import Evaluator
from hsurf.surfaces.domains import SheetPoint, w_value
from hsurf.surfaces.forms import SurfaceData

logger = logging.getLogger(__name__)

_SPHERE_MAPS = ("conj", "inv_conj", "rotation")
_CURVE_MAPS = ("conj", "sheet_swap", "conj_w", "conj_neg_w")


@dataclass(frozen=True, eq=False)
class SymmetryDescriptor:
    """A domain map paired with an isometry of R³.

    Parameters
    ----------
    domain_map : str
        ``conj``, ``inv_conj``, ``rotation:k``, ``sheet_swap``, ``conj_w`` or
        ``conj_neg_w``. On a curve ``conj`` means ``conj_w``.
    matrix : array_like
        Orthogonal 3×3 matrix.
    translation : array_like, optional
        Fitted from the first sample when omitted.
    name : str
    """

    domain_map: str
    matrix: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        kind, _, arg = self.domain_map.partition(":")
        if kind not in _SPHERE_MAPS + _CURVE_MAPS:
            raise ValueError(f"Unknown domain map {self.domain_map!r}")
        if kind == "rotation" and (not arg.isdigit() or int(arg) < 2):
            raise ValueError(f"rotation needs an order k ≥ 2, e.g. 'rotation:3', got {self.domain_map!r}")
        a = np.asarray(self.matrix, dtype=float)
        if a.shape != (3, 3) or not np.allclose(a @ a.T, np.eye(3), atol=1e-12):
            raise ValueError(f"Space map must be an orthogonal 3×3 matrix, got {a.tolist()}")
        object.__setattr__(self, "matrix", a)
        if self.translation is not None:
            object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float).reshape(3))

    @classmethod
    def from_dict(cls, data: dict) -> SymmetryDescriptor:
        return cls(
            data["domain_map"],
            np.asarray(data.get("matrix", np.eye(3)), dtype=float),
            None if data.get("translation") is None else np.asarray(data["translation"], dtype=float),
            data.get("name", data["domain_map"]),
        )

    def to_dict(self) -> dict:
        out = {"domain_map": self.domain_map, "matrix": self.matrix.tolist(), "name": self.name}
        if self.translation is not None:
            out["translation"] = self.translation.tolist()
        return out

    # --- Domain map ---

    def apply(self, s: SurfaceData, pt: SheetPoint) -> SheetPoint:
        d = s.domain
        kind, _, arg = self.domain_map.partition(":")
        z = pt.z
        match kind:
            case "conj":
                if d.is_sphere:
                    return SheetPoint(z.conjugate(), 0)
                return _curve_point(s, z.conjugate(), np.conj(w_value(d, pt)))
            case "inv_conj":
                return SheetPoint(1 / z.conjugate(), pt.sheet)
            case "rotation":
                return SheetPoint(z * np.exp(2j * np.pi / int(arg)), pt.sheet)
            case "sheet_swap":
                return SheetPoint(z, -pt.sheet)
            case "conj_w":
                return _curve_point(s, z.conjugate(), np.conj(w_value(d, pt)))
            case "conj_neg_w":
                return _curve_point(s, z.conjugate(), -np.conj(w_value(d, pt)))
        raise ValueError(f"Unknown domain map {self.domain_map!r}")


def _curve_point(s: SurfaceData, z: complex, w: complex) -> SheetPoint:
    return SheetPoint(z, int(s.domain.sheet_of(z, w)))


@dataclass(frozen=True, eq=False)
class SymmetryResult:
    descriptor: SymmetryDescriptor
    passed: bool
    max_deviation: float
    translation: np.ndarray
    n_samples: int

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        label = self.descriptor.name or self.descriptor.domain_map
        return f"{label}: {status} (max deviation {self.max_deviation:.3g} over {self.n_samples} samples)"


def symmetry_samples(s: SurfaceData, n: int, seed: int = 0) -> list[SheetPoint]:
    """Random regular points with ``0.3 ≤ |z| ≤ 3`` away from special points."""
    rng = np.random.default_rng(seed)
    d = s.domain
    specials = d.special_points()
    out: list[SheetPoint] = []
    while len(out) < n:
        r = np.exp(rng.uniform(np.log(0.3), np.log(3.0)))
        z = complex(r * np.exp(2j * np.pi * rng.uniform()))
        if any(abs(z - c) < 0.05 for c in specials) or abs(z.imag) < 1e-3:
            continue
        sheet = 0 if d.is_sphere else int(rng.choice([-1, 1]))
        out.append(SheetPoint(z, sheet))
    return out


def check_symmetry(
    s: SurfaceData,
    descriptor: SymmetryDescriptor,
    samples: Sequence[SheetPoint] | None = None,
    config: NumericsConfig = DEFAULT_CONFIG,
) -> SymmetryResult:
    """Maximum of ``|f(σ(p)) − (A f(p) + b)|`` over the samples.

    The check passes when the deviation is below ``tol·(1 + max |f|)``.
    """
    cfg = config.scans["symmetry"]
    pts = list(samples) if samples is not None else symmetry_samples(s, cfg["n_samples"], config.seed)
    ev = Evaluator(s, config)
    a = descriptor.matrix
    lhs, rhs = [], []
    for p in pts:
        try:
            lhs.append(ev(descriptor.apply(s, p)))
            rhs.append(a @ ev(p))
        except HarmonicSurfaceError as exc:
            logger.debug(f"Skipping symmetry sample {p}: {exc}")
    if not lhs:
        raise ValueError("No usable symmetry samples")
    lhs_arr, rhs_arr = np.array(lhs), np.array(rhs)
    b = descriptor.translation if descriptor.translation is not None else lhs_arr[0] - rhs_arr[0]
    dev = np.linalg.norm(lhs_arr - rhs_arr - b, axis=1)
    scale = 1.0 + float(np.abs(lhs_arr).max())
    max_dev = float(dev.max())
    passed = max_dev < cfg["tol"] * scale
    if not passed:
        logger.warning(f"{s.label}: symmetry {descriptor.domain_map} deviates by {max_dev:.3g}")
    return SymmetryResult(descriptor, passed, max_dev, b, len(lhs))


__all__ = [
    "SymmetryDescriptor",
    "SymmetryResult",
    "check_symmetry",
    "symmetry_samples",
]
