"""Chi-square distribution via the regularized incomplete gamma function."""

from __future__ import annotations

import math

from .exceptions import InputError, NumericError

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _gamma_series(a: float, x: float) -> float:
    # lower regularized P(a, x); converges fast for x < a + 1
    ap = a
    term = total = 1.0 / a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NumericError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_continued_fraction(a: float, x: float) -> float:
    # upper regularized Q(a, x) by modified Lentz; for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise NumericError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def regularized_gamma_p(a: float, x: float) -> float:
    """Lower regularized incomplete gamma P(a, x)."""
    if a <= 0 or x < 0:
        raise InputError(f"need a > 0 and x >= 0, got a={a}, x={x}")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_continued_fraction(a, x)


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0 or x < 0:
        raise InputError(f"need a > 0 and x >= 0, got a={a}, x={x}")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_continued_fraction(a, x)


def _check_df(df) -> float:
    try:
        ok = not isinstance(df, bool) and float(df) == int(df) and int(df) >= 1
    except (TypeError, ValueError, OverflowError):
        ok = False
    if not ok:
        raise InputError(f"degrees of freedom must be a positive integer, got {df!r}")
    return float(df)


def chi_square_cdf(x: float, df: int) -> float:
    k = _check_df(df)
    x = float(x)
    if not x >= 0 or math.isinf(x):
        raise InputError(f"chi-square statistic must be finite and >= 0, got {x}")
    return regularized_gamma_p(k / 2.0, x / 2.0)


def chi_square_sf(x: float, df: int) -> float:
    """Upper tail probability P(X > x) for X ~ chi-square(df)."""
    k = _check_df(df)
    x = float(x)
    if not x >= 0 or math.isinf(x):
        raise InputError(f"chi-square statistic must be finite and >= 0, got {x}")
    return regularized_gamma_q(k / 2.0, x / 2.0)


def chi_square_quantile(p: float, df: int) -> float:
    """The x with ``chi_square_cdf(x, df) == p``, by bracketing and bisection."""
    k = _check_df(df)
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InputError(f"probability must lie in (0, 1), got {p}")
    lo, hi = 0.0, max(1.0, k)
    while chi_square_cdf(hi, k) < p:
        lo, hi = hi, hi * 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chi_square_cdf(mid, k) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


__all__ = [
    "regularized_gamma_p",
    "regularized_gamma_q",
    "chi_square_cdf",
    "chi_square_sf",
    "chi_square_quantile",
]
