"""Singular series of the prime-pair conjecture and the empirical
autocorrelation sum_{n <= X} Lambda_F(n) Lambda_F(n + k)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._summation import fsum
from .coefficients.sieve import primes_up_to
from .coefficients.tables import CoefficientTable

DEFAULT_P = 1_000_000


@dataclass(frozen=True)
class SingularSeriesValue:
    k: int
    value: float
    cutoff: int
    tail_bound: float


@lru_cache(maxsize=8)
def _log_twin_product(P: int) -> float:
    p = primes_up_to(P)
    p = p[p > 2].astype(np.float64)
    return fsum(np.log1p(-1.0 / (p - 1.0) ** 2))


def _odd_prime_divisors(k: int):
    out = []
    while k % 2 == 0:
        k //= 2
    d = 3
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 2
    if k > 1:
        out.append(k)
    return out


def singular_series(k: int, P: int = DEFAULT_P) -> SingularSeriesValue:
    """S(k) = 2 prod_{p>2} (1 - 1/(p-1)^2) prod_{p | k, p > 2} (p-1)/(p-2), zero for odd k.

    The infinite product is truncated at P; its omitted factors change the
    logarithm by less than sum_{p > P} 1/(p-1)^2 < 1/(P - 1), recorded as the
    tail bound.  Divisors of k above P still get their exact factor.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if P < 3:
        raise ValueError("P must be at least 3")
    tail = 1.0 / (P - 1.0)
    if k % 2:
        return SingularSeriesValue(k, 0.0, P, 0.0)
    log_val = math.log(2.0) + _log_twin_product(P)
    log_val += fsum(math.log((p - 1.0) / (p - 2.0)) for p in _odd_prime_divisors(k))
    return SingularSeriesValue(k, math.exp(log_val), P, tail)


def autocorrelation(table: CoefficientTable, X: int, k: int) -> float:
    """sum_{n <= X} Lambda_F(n) Lambda_F(n + k)."""
    X = int(X)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if X + k > table.N:
        raise ValueError(f"X + k = {X + k} exceeds the table length {table.N}")
    lam = table.lambda_values
    return fsum(lam[1 : X + 1] * lam[1 + k : X + k + 1])
