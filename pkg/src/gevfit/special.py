"""Gamma-family special functions on the positive real axis.

Each function shifts its argument up to x >= 8 with the recurrence
Gamma(x+1) = x Gamma(x) and then applies the asymptotic series. Only
positive arguments are supported; there is no reflection formula.
"""
from __future__ import annotations

import math

from .errors import DomainError

_SHIFT_TO = 8.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2k} / (2k (2k-1)) for the Stirling series of ln Gamma
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
# B_{2k} / (2k) for psi
_DIGAMMA = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
# B_{2k} for psi'
_TRIGAMMA = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


def _check(x: float) -> float:
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"argument must be a finite positive real, got {x!r}")
    return x


def ln_gamma(x: float) -> float:
    x = _check(x)
    # ln Gamma(x) = ln Gamma(x + m) - ln(x (x+1) ... (x+m-1))
    prod = 1.0
    acc = 0.0
    while x < _SHIFT_TO:
        prod *= x
        if prod > 1e280:
            acc += math.log(prod)
            prod = 1.0
        x += 1.0
    acc += math.log(prod)
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    for c in reversed(_STIRLING):
        series = series * inv2 + c
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + series * inv - acc


def digamma(x: float) -> float:
    x = _check(x)
    acc = 0.0
    while x < _SHIFT_TO:
        acc += 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for c in reversed(_DIGAMMA):
        series = series * inv2 + c
    return math.log(x) - 0.5 / x - series * inv2 - acc


def trigamma(x: float) -> float:
    x = _check(x)
    acc = 0.0
    while x < _SHIFT_TO:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    for c in reversed(_TRIGAMMA):
        series = series * inv2 + c
    return inv + 0.5 * inv2 + series * inv2 * inv + acc


def gamma(x: float) -> float:
    if 1.0 <= x <= 171.0 and float(x).is_integer():
        return float(math.factorial(int(x) - 1))  # exact at positive integers
    return math.exp(ln_gamma(x))


def gamma_deriv(b: int, x: float) -> float:
    """b-th derivative of Gamma at x, for b in {0, 1, 2}."""
    if b not in (0, 1, 2):
        raise DomainError(f"derivative order must be 0, 1 or 2, got {b!r}")
    g = gamma(x)
    if b == 0:
        return g
    psi = digamma(x)
    if b == 1:
        return g * psi
    return g * (psi * psi + trigamma(x))
