"""Compensated summation helpers."""

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _neumaier_cumsum(x, out):
    s = 0.0
    c = 0.0
    for i in range(x.size):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


def compensated_cumsum(x) -> np.ndarray:
    """Running sums with Neumaier compensation (each entry is correctly
    rounded up to O(eps) independent of the length)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    if x.size:
        _neumaier_cumsum(x, out)
    return out


def fsum(x) -> float:
    """Exactly rounded sum of an array or iterable."""
    if isinstance(x, np.ndarray):
        return math.fsum(x.ravel().tolist())
    return math.fsum(x)


def csum(z) -> complex:
    z = np.asarray(z, dtype=np.complex128)
    return complex(fsum(z.real), fsum(z.imag))
