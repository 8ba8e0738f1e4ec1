"""Segmented Eratosthenes sieve and the von Mangoldt table."""

from __future__ import annotations

import math

import numpy as np

SEGMENT = 1 << 18


def _small_primes(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def primes_up_to(n: int, segment: int = SEGMENT) -> np.ndarray:
    """All primes <= n, sieved one segment at a time."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    root = math.isqrt(n)
    base = _small_primes(root)
    chunks = [base]
    lo = root + 1
    while lo <= n:
        hi = min(lo + segment, n + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            flags[start - lo :: p] = False
        chunks.append(np.flatnonzero(flags).astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


def prime_power_index(N: int, primes: np.ndarray | None = None):
    """Return (n, p, k) arrays listing every prime power n = p^k <= N."""
    if primes is None:
        primes = primes_up_to(N)
    ns, ps, ks = [primes], [primes], [np.ones(primes.size, dtype=np.int64)]
    k = 2
    q = primes[primes <= math.isqrt(N)]
    pw = q * q
    while q.size:
        keep = pw <= N
        q, pw = q[keep], pw[keep]
        if not q.size:
            break
        ns.append(pw.copy())
        ps.append(q.copy())
        ks.append(np.full(q.size, k, dtype=np.int64))
        pw = pw * q
        k += 1
    return np.concatenate(ns), np.concatenate(ps), np.concatenate(ks)


def von_mangoldt_sieve(N: int):
    """Classical von Mangoldt table Lambda(n), 1 <= n <= N, with prefix sums."""
    from .tables import CoefficientTable

    if N < 1:
        raise ValueError("N must be at least 1")
    lam = np.zeros(N + 1, dtype=np.float64)
    n, p, _ = prime_power_index(N)
    lam[n] = np.log(p.astype(np.float64))
    return CoefficientTable.from_lambda("zeta", lam, pole_order=1)
