"""Complex polynomials, rational functions, Laurent expansions and the form parser."""

from hsurf.algebra.calculus import Antiderivative, antiderivative, residue
from hsurf.algebra.laurent import (
    LaurentExpansion,
    form_order,
    function_series,
    laurent_at,
)
from hsurf.algebra.parser import (
    WExpr,
    parse_constant,
    parse_expression,
    parse_forms,
    parse_polynomial,
)
from hsurf.algebra.polynomials import CPoly, isolate_roots
from hsurf.algebra.rational import INFINITY, CRational, eval_rational, is_infinity

__all__ = [
    "INFINITY",
    "Antiderivative",
    "CPoly",
    "CRational",
    "LaurentExpansion",
    "WExpr",
    "antiderivative",
    "eval_rational",
    "form_order",
    "function_series",
    "is_infinity",
    "isolate_roots",
    "laurent_at",
    "parse_constant",
    "parse_expression",
    "parse_forms",
    "parse_polynomial",
    "residue",
]
