"""Cycle integrals, real periods and period closing."""

from hsurf.periods.closing import (
    FreeParam,
    PeriodProblem,
    SurfaceTemplate,
    close_periods,
    period_report,
    verify_closed,
)
from hsurf.periods.cycles import (
    CollapsedInterval,
    Cycle,
    ExplicitPath,
    PunctureLoop,
    cycle_integral,
    form_cycle_integral,
    homology_basis,
    real_period,
)
from hsurf.periods.quadrature import (
    Integrand,
    PathIntegrator,
    quad_complex,
    quad_segment,
)

__all__ = [
    "CollapsedInterval",
    "Cycle",
    "ExplicitPath",
    "FreeParam",
    "Integrand",
    "PathIntegrator",
    "PeriodProblem",
    "PunctureLoop",
    "SurfaceTemplate",
    "close_periods",
    "cycle_integral",
    "form_cycle_integral",
    "homology_basis",
    "period_report",
    "quad_complex",
    "quad_segment",
    "real_period",
    "verify_closed",
]
