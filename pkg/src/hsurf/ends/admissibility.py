"""Admissibility verdicts for reduced end types and the total-curvature tables."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cache
from importlib.resources import files

from hsurf.ends.types import EndType

logger = logging.getLogger(__name__)

# Citation tags
NEVER_PROPER_RULE = "[(0,0,n) never proper]"
EQUAL_PAIR_RULE = "[equal-pair winding obstruction]"
CONJECTURE_RULE = "[(m,n,m+n-1) conjecture]"
NO_RULE = "[no rule]"


class Verdict(str, Enum):
    NEVER_PROPER = "NeverProper"
    NEVER_EMBEDDED = "NeverEmbedded"
    KNOWN_EMBEDDED_FAMILY = "KnownEmbeddedFamily"
    OPEN = "Open"


@dataclass(frozen=True)
class AdmissibilityVerdict:
    verdict: Verdict
    rule: str

    def __str__(self) -> str:
        return f"{self.verdict.value} {self.rule}"


def _known_family(t: tuple[int, int, int]) -> str | None:
    """Citation of the embedded family containing ``t``, if any."""
    a, b, c = t
    match t:
        case (0, 0, 1):
            return "[order-1 ends]"
        case (1, 2, 2) | (0, 2, 2) | (0, 1, 2):
            return "[order-2 table]"
        case (0, 2, 3):
            return "[(0,2,3) two-end sphere]"
        case (2, 5, 8):
            return "[(2,5,8) end]"
        case (3, 4, 6):
            return "[(3,4,6) end]"
    if (a, b) == (2, 2) and c >= 3:
        return "[(2,2,n) graph proposition]"
    if (a, b) == (1, 2) and c >= 3:
        return "[(1,2,n) proposition]"
    if (a, b) == (0, 1) and c >= 3:
        return "[(0,1,n) proposition]"
    if (a, b) == (2, 3) and c >= 4:
        return "[(2,3,n) families]"
    return None


def admissibility(t: EndType | tuple[int, int, int]) -> AdmissibilityVerdict:
    """Verdict for a reduced end type.

    Rules, in order: ``(0,0,n)`` with ``n ≥ 2`` is never proper; a type whose
    two largest or two smallest entries are equal and at least 3 is never
    embedded; listed families are embedded; everything else is open.

    Examples
    --------
    >>> str(admissibility((0, 0, 2)))
    'NeverProper [(0,0,n) never proper]'
    >>> admissibility((1, 3, 3)).verdict.value
    'NeverEmbedded'
    >>> admissibility((2, 2, 7)).verdict.value
    'KnownEmbeddedFamily'
    """
    red = t.reduced if isinstance(t, EndType) else tuple(sorted(int(n) for n in t))
    if len(red) != 3 or min(red) < 0:
        raise ValueError(f"Not an end type: {red}")
    a, b, c = red
    if a == 0 and b == 0 and c >= 2:
        return AdmissibilityVerdict(Verdict.NEVER_PROPER, NEVER_PROPER_RULE)
    if (b == c and c >= 3) or (a == b and a >= 3):
        return AdmissibilityVerdict(Verdict.NEVER_EMBEDDED, EQUAL_PAIR_RULE)
    family = _known_family(red)
    if family is not None:
        return AdmissibilityVerdict(Verdict.KNOWN_EMBEDDED_FAMILY, family)
    if a >= 2 and c == a + b - 1:
        return AdmissibilityVerdict(Verdict.OPEN, CONJECTURE_RULE)
    if (a, b) == (2, 4):
        return AdmissibilityVerdict(Verdict.OPEN, "[(2,4,2n) regular but not proper]")
    return AdmissibilityVerdict(Verdict.OPEN, NO_RULE)


# ---------------------------------------------------------------------------
# Classification tables
# ---------------------------------------------------------------------------


@cache
def load_manifest() -> dict:
    """The committed catalog manifest (required fixtures and classification tables)."""
    text = files("hsurf.catalog").joinpath("manifest.json").read_text(encoding="utf-8")
    return json.loads(text)


def _multiple_of_2pi(total: float) -> int:
    k = round(total / (2 * math.pi))
    if not math.isclose(total, 2 * math.pi * k, rel_tol=1e-9, abs_tol=1e-9):
        raise ValueError(f"Total curvature {total} is not a multiple of 2π")
    return k


def _table_entry(total: float, genus: int) -> dict:
    k = _multiple_of_2pi(total)
    if genus < 0:
        raise ValueError(f"genus must be >= 0, got {genus}")
    for entry in load_manifest()["classification"]:
        lo, hi = entry["genus_min"], entry["genus_max"]
        if entry["total_over_2pi"] == k and genus >= lo and (hi is None or genus <= hi):
            return entry
    raise ValueError(f"No classification table for total curvature {k}·2π and genus {genus}")


def classify_budget(total: float, genus: int) -> list[list[tuple[int, int, int]]]:
    """End configurations of properly embedded surfaces with curvature ``total``.

    Parameters
    ----------
    total : float
        Total curvature, a multiple of 2π (``-2*pi``, ``-4*pi`` or ``-6*pi``).
    genus : int

    Returns
    -------
    list of list of tuple
        One list of end types per family, as tabulated; ``[]`` when no such
        surface exists.

    Raises
    ------
    ValueError
        If ``(total, genus)`` is outside the tabulated range.
    """
    entry = _table_entry(total, genus)
    logger.debug(f"Budget {entry['total_over_2pi']}·2π, genus {genus}: {entry['citation']}")
    return [[tuple(t) for t in family] for family in entry["families"]]


def classification_citation(total: float, genus: int) -> str:
    return _table_entry(total, genus)["citation"]


__all__ = [
    "AdmissibilityVerdict",
    "Verdict",
    "admissibility",
    "classification_citation",
    "classify_budget",
    "load_manifest",
]
