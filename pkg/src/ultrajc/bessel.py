"""Bessel functions of the first kind and integer order.

Small arguments use the ascending power series.  Larger arguments use
Miller's backward recurrence, normalised with ``J_0 + 2 sum_k J_2k = 1``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

MAX_ORDER = 200
MAX_ARG = 500.0
SERIES_LIMIT = 12.0
_RESCALE = 1e250


def _check(n: int, x: float) -> None:
    if int(n) != n:
        raise DomainError(f"order must be an integer, got {n!r}")
    if abs(n) > MAX_ORDER:
        raise DomainError(f"|n| = {abs(n)} exceeds the supported order {MAX_ORDER}")
    if not (0.0 <= x <= MAX_ARG) or math.isnan(x):
        raise DomainError(f"argument x = {x!r} outside [0, {MAX_ARG}]")


def _series(n: int, x: float) -> float:
    half = x / 2
    if half == 0.0:  # subnormal x
        return 0.0 if n else 1.0
    if n <= 30:
        term = half**n / math.factorial(n)
    else:
        term = math.exp(n * math.log(half) - math.lgamma(n + 1))
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= -(half * half) / (k * (n + k))
        terms.append(term)
        if k > half and abs(term) < 1e-18:
            break
    return math.fsum(terms)


def _miller(n_max: int, x: float) -> np.ndarray:
    """``J_0 .. J_{n_max}`` at ``x > 0`` by backward recurrence."""
    top = max(n_max, int(x)) + int(math.sqrt(60 * max(n_max, x, 1.0))) + 20
    top += top % 2
    vals = np.zeros(top + 2)
    vals[top] = 1.0
    for k in range(top, 0, -1):
        vals[k - 1] = (2 * k / x) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > _RESCALE:
            vals[k - 1 :] /= _RESCALE
    norm = vals[0] + 2 * vals[2 : top + 1 : 2].sum()
    return vals[: n_max + 1] / norm


def bessel_j(n: int, x: float) -> float:
    """``J_n(x)`` for integer ``|n| <= 200`` and ``0 <= x <= 500``."""
    _check(n, x)
    n = int(n)
    sign = -1.0 if (n < 0 and n % 2) else 1.0
    m = abs(n)
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x <= SERIES_LIMIT:
        return sign * _series(m, x)
    return sign * float(_miller(m, x)[m])


def bessel_j_orders(n_max: int, x: float) -> np.ndarray:
    """``[J_0(x), ..., J_{n_max}(x)]`` in one pass."""
    _check(n_max, x)
    if x == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    if x <= SERIES_LIMIT:
        return np.array([_series(m, x) for m in range(n_max + 1)])
    return _miller(n_max, x)


def bessel_j_symmetric(k: int, x: float) -> tuple[np.ndarray, np.ndarray]:
    """Orders ``-k .. k`` and their values, using ``J_{-n} = (-1)^n J_n``."""
    pos = bessel_j_orders(k, x)
    orders = np.arange(-k, k + 1)
    signs = np.where(orders < 0, (-1.0) ** np.abs(orders), 1.0)
    return orders, signs * pos[np.abs(orders)]
