"""Generate ordinates of the first n nontrivial zeros of zeta as a test-data file.

This is test tooling, not part of the library: the library only ingests zero
lists.  Zeros are located as sign changes of Hardy's Z-function on a fine grid
and refined with Brent's method.  Z is evaluated with the Riemann-Siegel formula
(main sum plus the C0, C1, C2 correction terms) above t = 300 and with
mpmath.siegelz below.  The result is checked against mpmath.zetazero at a few
indices, which also catches any missed or doubled zero before those indices.

usage: python3 scripts/make_zeta_zeros.py OUT [--count 10000]
"""

from __future__ import annotations

import argparse
import math
import sys

import mpmath
import numpy as np
from scipy.optimize import brentq

SWITCH = 300.0


def _psi_derivative_fits(deg=70):
    mpmath.mp.dps = 50

    def psi(p):
        return mpmath.cos(2 * mpmath.pi * (p * p - p - mpmath.mpf(1) / 16)) / mpmath.cos(2 * mpmath.pi * p)

    nodes = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))  # on [-1, 1]
    ps = 0.5 * (nodes + 1.0)
    fits = {}
    for k in (0, 2, 3, 6):
        vals = [float(mpmath.diff(psi, mpmath.mpf(float(p)), k)) for p in ps]
        fits[k] = np.polynomial.chebyshev.Chebyshev.fit(ps, vals, deg, domain=[0.0, 1.0])
    mpmath.mp.dps = 15
    return fits


_FITS = None


def theta(t):
    t = np.asarray(t, dtype=np.float64)
    return t / 2 * np.log(t / (2 * np.pi)) - t / 2 - np.pi / 8 + 1 / (48 * t) + 7 / (5760 * t**3) + 31 / (80640 * t**5)


def z_rs(t):
    """Riemann-Siegel Z(t) for t >= SWITCH (vectorized)."""
    global _FITS
    if _FITS is None:
        _FITS = _psi_derivative_fits()
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    a = np.sqrt(t / (2 * np.pi))
    N = np.floor(a).astype(np.int64)
    p = a - N
    th = theta(t)
    nmax = int(N.max())
    n = np.arange(1, nmax + 1, dtype=np.float64)
    out = np.empty(t.size)
    for s in range(0, t.size, 2048):
        tt, NN, thh = t[s : s + 2048], N[s : s + 2048], th[s : s + 2048]
        terms = np.cos(thh[:, None] - tt[:, None] * np.log(n)[None, :]) / np.sqrt(n)[None, :]
        terms[n[None, :] > NN[:, None]] = 0.0
        out[s : s + 2048] = 2 * terms.sum(axis=1)
    u = (2 * np.pi / t) ** 0.5
    c0 = _FITS[0](p)
    c1 = -_FITS[3](p) / (96 * np.pi**2)
    c2 = _FITS[2](p) / (64 * np.pi**2) + _FITS[6](p) / (18432 * np.pi**4)
    sign = np.where((N - 1) % 2 == 0, 1.0, -1.0)
    out += sign * (2 * np.pi / t) ** 0.25 * (c0 + c1 * u + c2 * u * u)
    return out


def z_exact(t: float) -> float:
    return float(mpmath.siegelz(t))


def zeros_up_to_count(count: int, step: float = 0.02):
    found = []
    # low range with mpmath
    ts = np.arange(10.0, SWITCH + step, step)
    vals = np.array([z_exact(t) for t in ts])
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
        found.append(brentq(z_exact, ts[i], ts[i + 1], xtol=1e-13))
        if len(found) >= count:
            return np.array(found[:count])
    lo = ts[-1]
    zfun = lambda x: float(z_rs(x)[0])
    while len(found) < count:
        ts = lo + step * np.arange(0, 50001)
        vals = z_rs(ts)
        for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
            found.append(brentq(zfun, ts[i], ts[i + 1], xtol=1e-12))
            if len(found) >= count:
                break
        lo = ts[-1]
    return np.array(found[:count])


def validate(zeros: np.ndarray, tol: float = 1e-6):
    checks = [i for i in (1, 100, 1000, 5000, 10000) if i <= zeros.size] + [zeros.size]
    worst = 0.0
    for i in sorted(set(checks)):
        ref = float(mpmath.zetazero(i).imag)
        worst = max(worst, abs(ref - zeros[i - 1]))
    if worst > tol:
        raise RuntimeError(f"generated zeros disagree with mpmath.zetazero by {worst:.2e}")
    return worst


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--count", type=int, default=10000)
    args = ap.parse_args(argv)
    zeros = zeros_up_to_count(args.count)
    worst = validate(zeros)
    with open(args.out, "w") as fh:
        fh.write(f"# first {zeros.size} zeta zero ordinates; checked against mpmath.zetazero (max dev {worst:.1e})\n")
        for g in zeros:
            fh.write(f"{g:.12f}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
