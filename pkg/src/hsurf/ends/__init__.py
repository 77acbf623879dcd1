"""End types, admissibility verdicts and the total-curvature budget."""

from hsurf.ends.admissibility import (
    AdmissibilityVerdict,
    Verdict,
    admissibility,
    classification_citation,
    classify_budget,
    load_manifest,
)
from hsurf.ends.curvature import (
    CurvatureBudget,
    end_order_budget,
    format_curvature,
    total_curvature,
)
from hsurf.ends.types import (
    EndType,
    check_nondegenerate,
    end_type,
    format_type,
    parse_type,
    raw_type,
    reduce_type,
)

__all__ = [
    "AdmissibilityVerdict",
    "CurvatureBudget",
    "EndType",
    "Verdict",
    "admissibility",
    "check_nondegenerate",
    "classification_citation",
    "classify_budget",
    "end_order_budget",
    "end_type",
    "format_curvature",
    "format_type",
    "load_manifest",
    "parse_type",
    "raw_type",
    "reduce_type",
    "total_curvature",
]
