"""Counterexample witnesses and their line-oriented text format.

One witness per line::

    <kind> p=<re>,<im>,<sheet> [p=...] [key=value ...] dist=<image distance>

``dist`` is the image-space residual of the claimed violation (``|f(p1) − f(p2)|``
for pairs, the normalised normal length for singular points, the bound on
``|f|`` for bounded escapes).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.evaluation.evaluate import Evaluator, normal_from_phi
from hsurf.surfaces.domains import SheetPoint, w_value
from hsurf.surfaces.forms import SurfaceData


class WitnessKind(str, Enum):
    SELF_INTERSECTION = "self_intersection"
    COINCIDENT_PAIR = "coincident_pair"
    SINGULAR_POINT = "singular_point"
    BOUNDED_ESCAPE = "bounded_escape"


@dataclass(frozen=True)
class Witness:
    kind: WitnessKind
    points: tuple[SheetPoint, ...]
    dist: float
    data: dict = field(default_factory=dict, compare=False)

    # --- Construction ---

    @classmethod
    def pair(cls, kind: WitnessKind, p1: SheetPoint, p2: SheetPoint, dist: float) -> Witness:
        """Pair witness with the points in parameter order."""
        a, b = sorted([p1, p2], key=_point_key)
        return cls(kind, (a, b), float(dist))

    @classmethod
    def singular_point(cls, pt: SheetPoint, nu: float) -> Witness:
        return cls(WitnessKind.SINGULAR_POINT, (pt,), float(nu))

    @classmethod
    def bounded_escape(cls, points: Sequence[SheetPoint], bound: float, **data) -> Witness:
        return cls(WitnessKind.BOUNDED_ESCAPE, tuple(points), float(bound), dict(data))

    # --- Text format ---

    def format(self) -> str:
        parts = [self.kind.value]
        parts += [f"p={p.z.real:.12g},{p.z.imag:.12g},{p.sheet:d}" for p in self.points]
        parts += [f"{k}={v}" for k, v in sorted(self.data.items())]
        parts.append(f"dist={self.dist:.6g}")
        return " ".join(parts)

    @classmethod
    def parse(cls, line: str) -> Witness:
        tokens = line.split()
        if not tokens:
            raise ValueError("Empty witness line")
        try:
            kind = WitnessKind(tokens[0])
        except ValueError:
            raise ValueError(f"Unknown witness kind {tokens[0]!r}") from None
        points, data, dist = [], {}, None
        for tok in tokens[1:]:
            key, sep, value = tok.partition("=")
            if not sep:
                raise ValueError(f"Malformed witness token {tok!r}")
            if key == "p":
                re, im, sheet = value.split(",")
                points.append(SheetPoint(complex(float(re), float(im)), int(sheet)))
            elif key == "dist":
                dist = float(value)
            else:
                data[key] = value
        if dist is None:
            raise ValueError(f"Witness line has no dist: {line!r}")
        return cls(kind, tuple(points), dist, data)

    def __str__(self) -> str:
        return self.format()

    # --- Re-verification ---

    def residual(self, s: SurfaceData, config: NumericsConfig = DEFAULT_CONFIG) -> float:
        """Re-evaluate the claimed violation on ``s``."""
        if self.kind in (WitnessKind.SELF_INTERSECTION, WitnessKind.COINCIDENT_PAIR):
            ev = Evaluator(s, config)
            return float(np.linalg.norm(ev(self.points[0]) - ev(self.points[1])))
        if self.kind is WitnessKind.SINGULAR_POINT:
            return normalised_normal(s, self.points[0])
        ev = Evaluator(s, config)
        return float(max(np.linalg.norm(ev(p)) for p in self.points))


def _point_key(p: SheetPoint) -> tuple[float, float, int]:
    return (p.z.real, p.z.imag, p.sheet)


def normalised_normal(s: SurfaceData, pt: SheetPoint) -> float:
    """``|f_x × f_y| / |φ|²`` at ``pt`` (0 exactly where ``f`` is singular)."""
    w = None if s.domain.is_sphere else w_value(s.domain, pt)
    phi = s.phi(pt.z, w)
    scale = float(np.sum(np.abs(phi) ** 2))
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(normal_from_phi(phi))) / scale


def sort_witnesses(witnesses: Iterable[Witness]) -> list[Witness]:
    """Deterministic order: by kind, then by parameters."""
    return sorted(witnesses, key=lambda w: (w.kind.value, [_point_key(p) for p in w.points]))


def format_witnesses(witnesses: Iterable[Witness]) -> str:
    lines = [w.format() for w in witnesses]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_witnesses(text: str) -> list[Witness]:
    return [Witness.parse(line) for line in text.splitlines() if line.strip() and not line.startswith("#")]


__all__ = [
    "Witness",
    "WitnessKind",
    "format_witnesses",
    "normalised_normal",
    "parse_witnesses",
    "sort_witnesses",
]
