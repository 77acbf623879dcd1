"""Gauss–Bonnet budget: total curvature from genus and end orders."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from hsurf.ends.types import EndType, end_type
from hsurf.surfaces.forms import SurfaceData

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurvatureBudget:
    """``total = −2π(2g − 2 + Σ n_j)`` over the end orders ``n_j``."""

    genus: int
    end_orders: tuple[int, ...]

    @property
    def multiple(self) -> int:
        """``total / 2π``."""
        return -(2 * self.genus - 2 + sum(self.end_orders))

    @property
    def total(self) -> float:
        return 2 * math.pi * self.multiple

    def __str__(self) -> str:
        return format_curvature(self.multiple)


def format_curvature(multiple: int) -> str:
    """``-4π`` style label for ``multiple·2π``.

    >>> format_curvature(-1)
    '-2π'
    >>> format_curvature(0)
    '0'
    """
    if multiple == 0:
        return "0"
    return f"{2 * multiple}π"


def total_curvature(s: SurfaceData, types: dict | None = None) -> CurvatureBudget:
    """Curvature budget of ``s`` from the reduced order of every end.

    ``types`` may supply precomputed :class:`EndType` values keyed by puncture.
    """
    types = types or {}
    orders = []
    for p in s.punctures:
        t: EndType = types.get(p) or end_type(s, p)
        orders.append(t.order)
    budget = CurvatureBudget(s.genus, tuple(orders))
    logger.debug(f"{s.label}: genus {s.genus}, end orders {orders}, total {format_curvature(budget.multiple)}")
    return budget


def end_order_budget(total: float, genus: int) -> int:
    """Required ``Σ n_j`` for total curvature ``total`` on a genus-``genus`` domain.

    >>> end_order_budget(-4 * math.pi, 0)
    4
    """
    k = round(total / (2 * math.pi))
    if not math.isclose(total, 2 * math.pi * k, rel_tol=1e-9, abs_tol=1e-9):
        raise ValueError(f"Total curvature {total} is not a multiple of 2π")
    return -k + 2 - 2 * genus


__all__ = [
    "CurvatureBudget",
    "end_order_budget",
    "format_curvature",
    "total_curvature",
]
