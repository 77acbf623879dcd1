"""Truncated power-series arithmetic on coefficient arrays.

Series are numpy arrays ``c`` with ``f(t) = c[0] + c[1] t + ...``; every
operation keeps the first ``n`` coefficients.
"""

from __future__ import annotations

import numpy as np


def _pad(c, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    c = np.asarray(c, dtype=complex)[:n]
    out[: c.size] = c
    return out


def series_mul(a, b, n: int) -> np.ndarray:
    """First ``n`` coefficients of ``a·b``."""
    return np.convolve(_pad(a, n), _pad(b, n))[:n]


def series_div(a, b, n: int) -> np.ndarray:
    """First ``n`` coefficients of ``a/b``; requires ``b[0] != 0``."""
    a = _pad(a, n)
    b = _pad(b, n)
    if b[0] == 0:
        raise ZeroDivisionError("leading coefficient of the denominator series is zero")
    ans = np.zeros(n, dtype=complex)
    for k in range(n):
        tot = a[k]
        for i in range(k):
            tot = tot - ans[i] * b[k - i]
        ans[k] = tot / b[0]
    return ans


def series_sqrt(a, n: int, s0: complex | None = None) -> np.ndarray:
    """First ``n`` coefficients of a square root of ``a``.

    ``s0`` selects the branch of the constant term (default: principal root).
    """
    a = _pad(a, n)
    if a[0] == 0:
        raise ZeroDivisionError("series square root needs a nonzero constant term")
    s = np.zeros(n, dtype=complex)
    s[0] = np.sqrt(a[0]) if s0 is None else s0
    for k in range(1, n):
        tot = a[k]
        for i in range(1, k):
            tot = tot - s[i] * s[k - i]
        s[k] = tot / (2 * s[0])
    return s
