"""Raw and reduced end types.

The raw type of an end is the sorted triple of pole orders of the three forms
at the puncture. The reduced type is the lexicographic minimum over all real
linear recombinations of the forms; it is reached by cancelling real-dependent
leading coefficients from the highest pole order down.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from hsurf.algebra.laurent import LaurentExpansion
from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.errors import DegenerateTriple
from hsurf.surfaces.domains import SheetPoint
from hsurf.surfaces.forms import SurfaceData, form_pole_order, local_expansion
from hsurf.tolerances import DEPENDENCE_TOL

logger = logging.getLogger(__name__)

# Extra coefficients kept past the constant term when reducing
_EXTRA_TERMS: int = 3


@dataclass(frozen=True)
class EndType:
    """Pole-order triples of an end.

    ``reducing_transform`` is the real 3×3 matrix ``A`` whose rows give the
    reduced forms as combinations of the original ones (``Ω' = A·Ω``).
    """

    raw: tuple[int, int, int]
    reduced: tuple[int, int, int]
    reducing_transform: np.ndarray = field(compare=False, repr=False)

    @property
    def order(self) -> int:
        return self.reduced[2]

    @property
    def was_reduced(self) -> bool:
        return self.raw != self.reduced

    def __str__(self) -> str:
        return "({},{},{})".format(*self.reduced)


def format_type(t: Sequence[int]) -> str:
    return "(" + ",".join(str(int(n)) for n in t) + ")"


def parse_type(text: str) -> tuple[int, int, int]:
    """Parse ``"(2,2,3)"`` (or ``"2,2,3"``) into a sorted triple."""
    parts = [p for p in text.strip().strip("()").split(",") if p.strip()]
    if len(parts) != 3:
        raise ValueError(f"An end type has three entries, got {text!r}")
    return tuple(sorted(int(p) for p in parts))  # type: ignore[return-value]


def raw_type(s: SurfaceData, p: SheetPoint) -> tuple[int, int, int]:
    """Sorted pole orders of ``ω1, ω2, ω3`` at the puncture ``p``."""
    if p not in s.punctures:
        raise ValueError(f"{p} is not a puncture of {s!r}")
    orders = [form_pole_order(f, s.domain, p) for f in s.omega]
    return tuple(sorted(orders))  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------------


def _stored_top(e: LaurentExpansion) -> int:
    """One past the highest degree stored in ``e``."""
    return e.min_degree + len(e.coeffs)


def _leading_degree(e: LaurentExpansion) -> int | None:
    live = np.flatnonzero(np.abs(np.asarray(e.coeffs, dtype=complex)) > 0)
    return e.min_degree + int(live[0]) if live.size else None


def _orders(rows: np.ndarray, tol: float) -> list[int]:
    depth = rows.shape[1]
    orders = []
    for r in rows:
        live = np.flatnonzero(np.abs(r) > tol)
        orders.append(depth - int(live[0]) if live.size else 0)
    return orders


def reduce_type(
    expansions: Sequence[LaurentExpansion], dependence_tol: float = DEPENDENCE_TOL
) -> EndType:
    """Reduce the pole-order triple of three local expansions.

    At each pole order ``m`` (highest first), the complex leading coefficients
    of the forms of order ``m`` are viewed as vectors in ℝ². When they are
    real-linearly dependent, the form of largest index in the dependency is
    replaced by the combination that cancels its leading term. This repeats
    until every level is independent.

    Parameters
    ----------
    expansions : sequence of LaurentExpansion
        Expansions of the three forms in the same local chart. Each must carry
        coefficients up to at least ``t^(−1)``.
    dependence_tol : float
        Relative tolerance on the real determinant of leading coefficients.

    Raises
    ------
    DegenerateTriple
        If a combination of the forms vanishes to all stored orders.

    Examples
    --------
    >>> from hsurf.algebra import CRational, laurent_at
    >>> z = CRational.z()
    >>> forms = [z ** -2, z ** -2 + CRational.constant(1), z ** -2 * 1j]
    >>> str(reduce_type([laurent_at(f, 0, 4) for f in forms]))
    '(0,2,2)'
    """
    if len(expansions) != 3:
        raise ValueError(f"Expected three expansions, got {len(expansions)}")
    depth = max(e.pole_order for e in expansions)
    scale = max((max((abs(c) for c in e.coeffs), default=0.0) for e in expansions), default=0.0)
    if scale == 0.0:
        raise DegenerateTriple("All three forms vanish")
    zero_tol = dependence_tol * scale

    # Coefficients of t^(−depth) up to the last degree every nonzero form stores
    top = max(min(_stored_top(e) for e in expansions if _leading_degree(e) is not None), 0)
    rows = np.zeros((3, depth + top), dtype=complex)
    for i, e in enumerate(expansions):
        for j, d in enumerate(range(-depth, top)):
            rows[i, j] = e.coeff(d)
    transform = np.eye(3)
    raw = tuple(sorted(_orders(rows[:, :depth], zero_tol)))

    for m in range(depth, 0, -1):
        col = depth - m
        while True:
            orders = _orders(rows[:, :depth], zero_tol)
            level = [i for i in range(3) if orders[i] == m]
            if len(level) < 2:
                break
            lead = rows[level, col]
            norms = np.abs(lead)
            real = np.vstack([lead.real / norms, lead.imag / norms])
            ns = null_space(real, rcond=dependence_tol)
            if ns.shape[1] == 0:
                break
            lam = ns[:, 0] / norms
            support = [level[k] for k in range(len(level)) if abs(ns[k, 0]) > dependence_tol]
            target = max(support)
            weights = np.zeros(3)
            for k, i in enumerate(level):
                weights[i] = lam[k]
            weights /= weights[target]
            rows[target] = weights @ rows
            transform[target] = weights @ transform
            logger.debug(f"Cancelled order-{m} leading term of form {target + 1} with weights {weights}")

    if np.any(np.all(np.abs(rows) <= zero_tol, axis=1)):
        raise DegenerateTriple("The forms are real-linearly dependent at this end")
    reduced = tuple(sorted(_orders(rows[:, :depth], zero_tol)))
    return EndType(raw, reduced, transform)  # type: ignore[arg-type]


def check_nondegenerate(
    s: SurfaceData, n_samples: int = 7, seed: int = 0, config: NumericsConfig = DEFAULT_CONFIG
) -> None:
    """Raise :class:`DegenerateTriple` if ``ω1, ω2, ω3`` are real-linearly dependent."""
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.5, 1.5, n_samples) + 1j * rng.uniform(-1.5, 1.5, n_samples) + 0.37 + 0.21j
    w = None if s.domain.is_sphere else s.domain.w_plus(z)
    phi = s.phi(z, w)
    mat = np.vstack([phi.real, phi.imag])
    scale = np.abs(mat).max()
    if scale == 0 or np.linalg.matrix_rank(mat, tol=config.dependence_tol * scale) < 3:
        raise DegenerateTriple(f"{s.label or 'surface'}: the forms are real-linearly dependent")


def _expansions(s: SurfaceData, p: SheetPoint, depth: int, extra: int) -> list[LaurentExpansion]:
    """Expansions at ``p`` reaching ``extra`` degrees past the highest leading degree."""
    expansions = [local_expansion(f, s.domain, p, n_terms=depth + extra + 1) for f in s.omega]
    leads = [d for d in map(_leading_degree, expansions) if d is not None]
    need = max(max(leads, default=0), 0) + extra
    for i, f in enumerate(s.omega):
        e = expansions[i]
        n_terms = need - e.min_degree
        # chart series may return fewer degrees than asked; widen until covered
        for _ in range(4):
            if _stored_top(e) >= need or _leading_degree(e) is None:
                break
            e = local_expansion(f, s.domain, p, n_terms=n_terms)
            n_terms *= 2
        expansions[i] = e
    return expansions


def end_type(s: SurfaceData, p: SheetPoint, config: NumericsConfig = DEFAULT_CONFIG) -> EndType:
    """Raw and reduced type of the end at ``p``.

    Every form is expanded past the highest leading degree among the three,
    so a form vanishing to high order at ``p`` is not read as zero. The triple
    is known to be independent, so a reduction that cancels a form to all
    stored orders is retried with longer expansions.
    """
    if p not in s.punctures:
        raise ValueError(f"{p} is not a puncture of {s!r}")
    check_nondegenerate(s, config=config)
    depth = max(form_pole_order(f, s.domain, p) for f in s.omega)
    last: DegenerateTriple | None = None
    for extra in (_EXTRA_TERMS, 4 * _EXTRA_TERMS, 16 * _EXTRA_TERMS):
        try:
            return reduce_type(_expansions(s, p, depth, extra), config.dependence_tol)
        except DegenerateTriple as exc:
            logger.debug(f"Reduction at {p} exhausted {extra} extra terms; expanding further")
            last = exc
    assert last is not None
    raise last


__all__ = [
    "EndType",
    "check_nondegenerate",
    "end_type",
    "format_type",
    "parse_type",
    "raw_type",
    "reduce_type",
]
