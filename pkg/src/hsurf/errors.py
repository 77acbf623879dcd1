"""Exceptions raised by hsurf."""


class HarmonicSurfaceError(Exception):
    """Base class for all hsurf errors."""


class NumericalFailure(HarmonicSurfaceError):
    """A numerical procedure did not meet its tolerance."""


# --- Algebra ---


class PoleHit(HarmonicSurfaceError, ZeroDivisionError):
    """Evaluation point lies within tolerance of a pole."""


class FactorizationFailure(NumericalFailure):
    """Roots of a denominator could not be isolated."""


# --- Domains ---


class BranchPoint(HarmonicSurfaceError, ValueError):
    """Point lies on a branch point where the sheet is undefined."""


class PathThroughPole(HarmonicSurfaceError, ValueError):
    """Integration path passes through a pole of a form."""


# --- Ends ---


class DegenerateTriple(HarmonicSurfaceError, ValueError):
    """The three forms are real-linearly dependent."""


# --- Periods ---


class QuadratureNonConvergence(NumericalFailure):
    """Adaptive quadrature exhausted its subdivision budget."""


class NoBracket(NumericalFailure):
    """Target period does not change sign over the declared interval."""


class PeriodsNotClosed(NumericalFailure):
    """Real periods remain above tolerance after solving."""


# --- Evaluation ---


class SingularPoint(NumericalFailure, ValueError):
    """f_x × f_y vanishes to tolerance; the surface is not regular here."""


# --- Catalog ---


class SchemaError(HarmonicSurfaceError, ValueError):
    """Fixture JSON does not match the catalog schema."""


class UnresolvedParam(HarmonicSurfaceError, ValueError):
    """A fixture parameter was not bound and has no default."""
