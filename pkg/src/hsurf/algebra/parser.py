"""Recursive-descent parser for rational expressions in ``z`` (and ``w``).

Grammar (lowest to highest precedence)::

    forms  := expr ("," expr)*
    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary | unary)*      # juxtaposition multiplies
    unary  := ("+" | "-") unary | power
    power  := atom (("^" | "**") unary)?
    atom   := NUMBER | NAME | NAME "(" args ")" | "(" expr ")"

Names are ``z``, ``w``, ``i``, ``pi``, bound parameters, and the constant
functions ``sqrt``, ``exp``, ``log``, ``cos``, ``sin``, ``abs``, ``gamma``
(real argument) and ``root_of_unity(k, j)``.
On a curve ``w² = p(z)`` every value is kept as ``a(z) + b(z)/w``.
"""

from __future__ import annotations

import cmath
import math
import re
from collections.abc import Callable, Mapping
from dataclasses import dataclass

from hsurf.algebra.polynomials import CPoly
from hsurf.algebra.rational import CRational
from hsurf.errors import UnresolvedParam

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)

_FUNCTIONS: dict[str, Callable[..., complex]] = {
    "sqrt": cmath.sqrt,
    "exp": cmath.exp,
    "cos": cmath.cos,
    "sin": cmath.sin,
    "log": cmath.log,
    "abs": lambda x: complex(abs(x)),
    "gamma": lambda x: complex(math.gamma(x.real)),
    "root_of_unity": lambda k, j: cmath.exp(2j * cmath.pi * j / k),
}

_RESERVED = {"z", "w", "i", "pi"} | set(_FUNCTIONS)


@dataclass(frozen=True)
class WExpr:
    """``a(z) + b(z)/w``; ``b`` is zero for expressions free of ``w``."""

    a: CRational
    b: CRational

    @classmethod
    def const(cls, c: complex) -> WExpr:
        return cls(CRational.constant(c), CRational.zero())

    @property
    def has_w(self) -> bool:
        return not self.b.is_zero

    @property
    def is_constant(self) -> bool:
        return not self.has_w and self.a.is_constant

    def value(self) -> complex:
        if not self.is_constant:
            raise ValueError("expected a constant expression")
        return self.a.constant_value

    def reduce(self) -> WExpr:
        return WExpr(self.a.reduce(), self.b.reduce())


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"Unexpected character {text[pos]!r} at {pos} in {text!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(
        self,
        text: str,
        branch_poly: CPoly | None,
        params: Mapping[str, complex | float | int],
    ):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.p = CRational.from_poly(branch_poly) if branch_poly is not None else None
        self.params = params

    # --- Token helpers ---

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ValueError(f"Unexpected end of expression in {self.text!r}")
        self.pos += 1
        return tok

    def accept(self, op: str) -> bool:
        tok = self.peek()
        if tok is not None and tok == ("op", op):
            self.pos += 1
            return True
        return False

    def expect(self, op: str) -> None:
        if not self.accept(op):
            raise ValueError(f"Expected {op!r} at token {self.pos} in {self.text!r}")

    def starts_atom(self) -> bool:
        tok = self.peek()
        return tok is not None and (tok[0] in ("num", "name") or tok == ("op", "("))

    # --- Arithmetic on a + b/w ---

    def add(self, x: WExpr, y: WExpr) -> WExpr:
        return WExpr(x.a + y.a, x.b + y.b)

    def mul(self, x: WExpr, y: WExpr) -> WExpr:
        bb = CRational.zero()
        if x.has_w and y.has_w:
            bb = x.b * y.b / self.curve()  # 1/w² = 1/p
        return WExpr(x.a * y.a + bb, x.a * y.b + x.b * y.a)

    def div(self, x: WExpr, y: WExpr) -> WExpr:
        if not y.has_w:
            if y.a.is_zero:
                raise ZeroDivisionError(f"Division by zero in {self.text!r}")
            return WExpr(x.a / y.a, x.b / y.a)
        if y.a.is_zero:
            # (a + b/w)·w/c = b/c + a·p/(c w)
            return WExpr(x.b / y.b, x.a * self.curve() / y.b)
        raise ValueError(f"Cannot divide by a mixed expression in w: {self.text!r}")

    def power(self, x: WExpr, n: int) -> WExpr:
        if n < 0:
            x = self.div(WExpr.const(1), x)
            n = -n
        out = WExpr.const(1)
        for _ in range(n):
            out = self.mul(out, x)
        return out

    def curve(self) -> CRational:
        if self.p is None:
            raise ValueError(f"'w' used without a curve w² = p(z): {self.text!r}")
        return self.p

    # --- Grammar ---

    def forms(self) -> list[WExpr]:
        out = [self.expr()]
        while self.accept(","):
            out.append(self.expr())
        if self.peek() is not None:
            raise ValueError(f"Trailing input at token {self.pos} in {self.text!r}")
        return out

    def expr(self) -> WExpr:
        value = self.term()
        while True:
            if self.accept("+"):
                value = self.add(value, self.term())
            elif self.accept("-"):
                t = self.term()
                value = self.add(value, WExpr(-t.a, -t.b))
            else:
                return value

    def term(self) -> WExpr:
        value = self.unary()
        while True:
            if self.accept("*"):
                value = self.mul(value, self.unary())
            elif self.accept("/"):
                value = self.div(value, self.unary())
            elif self.starts_atom():
                value = self.mul(value, self.power_())
            else:
                return value

    def unary(self) -> WExpr:
        if self.accept("-"):
            v = self.unary()
            return WExpr(-v.a, -v.b)
        if self.accept("+"):
            return self.unary()
        return self.power_()

    def power_(self) -> WExpr:
        base = self.atom()
        if self.accept("^") or self.accept("**"):
            exponent = self.unary().value()
            n = round(exponent.real)
            if abs(exponent - n) > 1e-12:
                raise ValueError(f"Non-integer exponent {exponent} in {self.text!r}")
            return self.power(base, n)
        return base

    def atom(self) -> WExpr:
        kind, val = self.take()
        if kind == "num":
            return WExpr.const(float(val))
        if kind == "op":
            if val != "(":
                raise ValueError(f"Unexpected {val!r} in {self.text!r}")
            inner = self.expr()
            self.expect(")")
            return inner
        if val in _FUNCTIONS:
            self.expect("(")
            args = [self.expr().value()]
            while self.accept(","):
                args.append(self.expr().value())
            self.expect(")")
            if val == "root_of_unity":
                args = [a.real for a in args]
            return WExpr.const(_FUNCTIONS[val](*args))
        if val == "z":
            return WExpr(CRational.z(), CRational.zero())
        if val == "w":
            # w = p/w
            return WExpr(CRational.zero(), self.curve())
        if val == "i":
            return WExpr.const(1j)
        if val == "pi":
            return WExpr.const(cmath.pi)
        if val in self.params:
            return WExpr.const(complex(self.params[val]))
        raise UnresolvedParam(f"Unbound name {val!r} in {self.text!r}")


def parse_forms(
    text: str,
    branch_poly: CPoly | None = None,
    params: Mapping[str, complex | float | int] | None = None,
) -> list[WExpr]:
    """Parse comma-separated expressions.

    Examples
    --------
    >>> [e.a(2.0) for e in parse_forms("1, i, 1/z")]
    [(1+0j), 1j, (0.5+0j)]
    """
    return [e.reduce() for e in _Parser(text, branch_poly, params or {}).forms()]


def parse_expression(
    text: str,
    branch_poly: CPoly | None = None,
    params: Mapping[str, complex | float | int] | None = None,
) -> WExpr:
    """Parse a single expression."""
    out = parse_forms(text, branch_poly, params)
    if len(out) != 1:
        raise ValueError(f"Expected one expression, got {len(out)} in {text!r}")
    return out[0]


def parse_constant(
    text: str | float | int, params: Mapping[str, complex | float | int] | None = None
) -> complex:
    """Evaluate a constant expression such as ``"sqrt(6)"`` or ``"root_of_unity(3,1)"``."""
    if isinstance(text, (int, float)):
        return complex(text)
    return _Parser(text, None, params or {}).forms()[0].value()


def parse_polynomial(
    text: str, params: Mapping[str, complex | float | int] | None = None
) -> CPoly:
    """Parse a polynomial in ``z``, e.g. the branch polynomial ``"z(z-1)(z+1)"``."""
    e = parse_expression(text, None, params)
    if e.has_w or not e.a.is_polynomial:
        raise ValueError(f"{text!r} is not a polynomial in z")
    return e.a.num * (1 / e.a.den.lead)


def reserved_names() -> frozenset[str]:
    """Names that cannot be used as fixture parameters."""
    return frozenset(_RESERVED)
