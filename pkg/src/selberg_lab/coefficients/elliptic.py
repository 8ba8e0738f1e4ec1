"""Frobenius traces a_p = p + 1 - #E(F_p) for curves given by integer
Weierstrass coefficients (a1, a2, a3, a4, a6).

The default method counts points exhaustively: after completing the square the
curve becomes (2y + a1 x + a3)^2 = f(x) with f(x) = 4x^3 + b2 x^2 + 2 b4 x + b6,
so #E(F_p) = p + 1 + sum_x chi(f(x)).  The Legendre symbols come from a table of
squares and f is stepped with finite differences, so each prime costs O(p) adds.
Counting the singular point at bad primes gives the usual a_p in {0, 1, -1}
provided the model is minimal there.

A baby-step giant-step method (Mestre's twist trick) is available for large
good primes.
"""

from __future__ import annotations

import math
import random

import numba
import numpy as np


def b_invariants(a1, a2, a3, a4, a6):
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    return b2, b4, b6


@numba.njit(cache=True)
def _trace_odd(p, b2, b4, b6):
    qr = np.full(p, -1, dtype=np.int8)
    qr[0] = 0
    sq = 0
    for y in range(1, (p + 1) // 2):
        sq += 2 * y - 1
        if sq >= p:
            sq %= p
        qr[sq] = 1
    f = b6 % p
    d1 = (4 + b2 + 2 * b4) % p
    d2 = (24 + 2 * b2) % p
    d3 = 24 % p
    s = 0
    for _ in range(p):
        s += qr[f]
        f += d1
        if f >= p:
            f -= p
        d1 += d2
        if d1 >= p:
            d1 -= p
        d2 += d3
        if d2 >= p:
            d2 -= p
    return -s


@numba.njit(cache=True)
def _traces_serial(primes, b2, b4, b6):
    out = np.empty(primes.size, dtype=np.int64)
    for i in range(primes.size):
        out[i] = _trace_odd(primes[i], b2, b4, b6)
    return out


@numba.njit(cache=True, parallel=True)
def _traces_parallel(primes, b2, b4, b6):
    out = np.empty(primes.size, dtype=np.int64)
    # largest primes first so the workers stay balanced
    for j in numba.prange(primes.size):
        i = primes.size - 1 - j
        out[i] = _trace_odd(primes[i], b2, b4, b6)
    return out


def trace_two(a_inv) -> int:
    """a_2 by brute force over the general Weierstrass equation."""
    a1, a2, a3, a4, a6 = a_inv
    count = 1
    for x in range(2):
        for y in range(2):
            if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % 2 == 0:
                count += 1
    return 3 - count


def traces_table(a_inv, primes, parallel: bool = False) -> np.ndarray:
    """Exhaustive-count traces for an array of primes."""
    primes = np.asarray(primes, dtype=np.int64)
    b2, b4, b6 = b_invariants(*a_inv)
    out = np.empty(primes.size, dtype=np.int64)
    two = primes == 2
    out[two] = trace_two(a_inv)
    odd = primes[~two]
    if odd.size:
        kern = _traces_parallel if parallel else _traces_serial
        out[~two] = kern(odd, b2, b4, b6)
    return out


# -- baby-step giant-step -------------------------------------------------


def _add(P, Q, A, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _mul(k, P, A, p):
    R = None
    if k < 0:
        k, P = -k, (P[0], (-P[1]) % p)
    while k:
        if k & 1:
            R = _add(R, P, A, p)
        P = _add(P, P, A, p)
        k >>= 1
    return R


def _sqrt_mod(a, p):
    from sympy.ntheory.residue_ntheory import sqrt_mod

    return sqrt_mod(a, p)


def _random_point(A, B, p, rng):
    while True:
        x = rng.randrange(p)
        rhs = (x * x * x + A * x + B) % p
        if rhs == 0:
            continue
        if pow(rhs, (p - 1) // 2, p) == 1:
            return x, _sqrt_mod(rhs, p)


def _annihilating_orders(P, A, p):
    """All m in the Hasse interval with m P = O."""
    lo = p + 1 - 2 * math.isqrt(p) - 2
    hi = p + 1 + 2 * math.isqrt(p) + 2
    s = math.isqrt(hi - lo) + 1
    baby = {}
    R = None
    for j in range(s):
        key = None if R is None else (R[0], (-R[1]) % p)
        baby.setdefault(key, []).append(j)
        R = _add(R, P, A, p)
    step = _mul(s, P, A, p)
    G = _mul(lo, P, A, p)
    found = set()
    for i in range(s + 1):
        for j in baby.get(G, ()):
            m = lo + i * s + j
            if lo <= m <= hi:
                found.add(m)
        G = _add(G, step, A, p)
    return found


def trace_bsgs(a_inv, p: int, tries: int = 8) -> int:
    """a_p at a good prime p > 3 by Mestre's baby-step giant-step method."""
    if p <= 3:
        raise ValueError("BSGS path needs p > 3")
    b2, b4, b6 = b_invariants(*a_inv)
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    A, B = (-27 * c4) % p, (-54 * c6) % p
    if (4 * A**3 + 27 * B**2) % p == 0:
        raise ValueError(f"p = {p} is a bad prime; use the table method")
    rng = random.Random(p)
    d = 2
    while pow(d, (p - 1) // 2, p) != p - 1:
        d += 1
    At, Bt = A * d * d % p, B * d * d * d % p
    cand = None
    for _ in range(tries):
        orders = _annihilating_orders(_random_point(A, B, p, rng), A, p)
        cand = orders if cand is None else cand & orders
        twist = _annihilating_orders(_random_point(At, Bt, p, rng), At, p)
        cand &= {2 * p + 2 - m for m in twist}
        if len(cand) == 1:
            return p + 1 - cand.pop()
    raise RuntimeError(f"group order at p = {p} not pinned down after {tries} rounds")


def traces(a_inv, primes, method: str = "table", parallel: bool = False, bad=frozenset()) -> np.ndarray:
    if method == "table":
        return traces_table(a_inv, primes, parallel=parallel)
    if method == "bsgs":
        primes = np.asarray(primes, dtype=np.int64)
        small = (primes < 1000) | np.isin(primes, list(bad))
        out = np.empty(primes.size, dtype=np.int64)
        out[small] = traces_table(a_inv, primes[small], parallel=parallel)
        out[~small] = [trace_bsgs(a_inv, int(p)) for p in primes[~small]]
        return out
    raise ValueError(f"unknown point-count method {method!r}")
