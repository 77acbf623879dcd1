"""Domains (sphere and genus-1 curves), meromorphic forms and local charts."""

from hsurf.surfaces.charts import (
    Annulus,
    Chart,
    ChartKind,
    Core,
    Decomposition,
    decompose,
)
from hsurf.surfaces.domains import (
    INFINITY,
    BranchTrack,
    Domain,
    DomainKind,
    SheetPoint,
    branch_nodes,
    puncture_radius,
    track_branch,
    w_value,
)
from hsurf.surfaces.forms import (
    MeromorphicForm,
    SurfaceData,
    combine,
    form_pole_order,
    form_residue,
    local_expansion,
    residues_real_check,
)

__all__ = [
    "INFINITY",
    "Annulus",
    "BranchTrack",
    "Chart",
    "ChartKind",
    "Core",
    "Decomposition",
    "Domain",
    "DomainKind",
    "MeromorphicForm",
    "SheetPoint",
    "SurfaceData",
    "branch_nodes",
    "combine",
    "decompose",
    "form_pole_order",
    "form_residue",
    "local_expansion",
    "puncture_radius",
    "residues_real_check",
    "track_branch",
    "w_value",
]
