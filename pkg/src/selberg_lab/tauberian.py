"""Numerical checks of the kernel lemmas behind the variance/pair-correlation
equivalences: the Fejer-kernel functional, the band-limited kernel K_eta and
its Fourier transform, and the exponential-weight averaging lemma."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.special import sici

from .lfunc_registry import EULER_GAMMA

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


class TailError(RuntimeError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    kind: str  # fejer | k_eta | exp_weight
    kappa: float | None = None
    eta: float | None = None
    Y: float | None = None

    def __post_init__(self):
        if self.kind not in ("fejer", "k_eta", "exp_weight"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kappa is not None and not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.eta is not None and not self.eta > 0:
            raise ValueError("eta must be positive")


def _gl(fn, edges, chunk: int = 1 << 16) -> float:
    edges = np.asarray(edges, dtype=np.float64)
    parts = []
    for lo in range(0, edges.size - 1, chunk):
        e = edges[lo : lo + chunk + 1]
        half = 0.5 * np.diff(e)
        mid = 0.5 * (e[1:] + e[:-1])
        nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        weights = (half[:, None] * _GL_W[None, :]).ravel()
        parts.append(float(np.dot(weights, fn(nodes))))
    return math.fsum(parts)


def _tabulated(f):
    """Turn (grid, values) into a cubic-spline callable; pass callables through."""
    if callable(f):
        return f, None
    grid, vals = (np.asarray(a, dtype=np.float64) for a in f)
    spline = CubicSpline(grid, vals)
    return spline, (float(grid[0]), float(grid[-1]))


# -- Lemma 1: Fejer functional ---------------------------------------------------


def fejer_kernel(u, kappa):
    """(sin(kappa u) / u)^2, smooth at u = 0."""
    return kappa * kappa * np.sinc(kappa * np.asarray(u) / math.pi) ** 2


def fejer_functional(f, kappa: float, U: float | None = None, tol: float = 1e-8, growth_eps: float = 0.01) -> float:
    """I(kappa) = int_R (sin(kappa u)/u)^2 f(|u|) du for even f.

    ``f`` is a callable or a pair (grid, values) tabulated on [0, U].  The
    head [0, U] is integrated with 24-point Gauss-Legendre panels of one kernel
    period, so f must vary slowly on the scale 1/kappa.  For callables the tail
    uses scipy's QAGS and QAWF (Fourier weight) routines; for tables f is continued as the constant f(U), and the error of
    that continuation under the growth envelope |u|^growth_eps is bounded and
    must stay below ``tol``.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    fn, span = _tabulated(f)
    if span is not None:
        if span[0] > 0:
            raise ValueError("tabulated f must start at u = 0")
        U = span[1] if U is None else min(U, span[1])
        period = math.pi / kappa
        samples_per_period = (np.asarray(f[0]).size - 1) / (U / period)
        if samples_per_period < 20:
            raise ValueError("tabulation too coarse: need >= 20 samples per kernel oscillation")
    if U is None:
        # the tail beyond U is O(f(U)/U); push it far out for callables
        U = 2.0e6 / kappa
    if U < 10.0 / kappa:
        raise ValueError("need U >= 10 / kappa")
    # one kernel period per 24-point panel
    width = math.pi / kappa
    n = max(1, int(math.ceil(U / width)))
    edges = np.linspace(0.0, U, n + 1)
    head = _gl(lambda u: fejer_kernel(u, kappa) * fn(u), edges)
    if span is None:
        g = lambda u: fn(u) / (u * u)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            # int_U^inf f(u)/u^2 du = (1/U) int_0^1 f(U/v) dv
            plain, e1 = integrate.quad(lambda v: fn(U / v) / U if v > 0 else 0.0, 0.0, 1.0, limit=400, epsabs=tol / 10, epsrel=1e-10)
            osc, e2 = integrate.quad(g, U, np.inf, weight="cos", wvar=2.0 * kappa, limlst=200, epsabs=tol / 10)
        if e1 + e2 > tol:
            # QUADPACK's estimate is pessimistic for oscillating f; report, don't fail
            warnings.warn(f"tail quadrature error estimate {e1 + e2:.2e} exceeds {tol:.1e}", RuntimeWarning, stacklevel=2)
        tail = 0.5 * (plain - osc)
    else:
        fU = float(fn(U))
        si, _ = sici(2.0 * kappa * U)
        tail = fU * (math.sin(kappa * U) ** 2 / U + kappa * (0.5 * math.pi - si))
        bound = 2.0 * abs(fU) * growth_eps / (U * (1.0 - growth_eps))
        if bound > tol:
            raise TailError(f"tail bound {bound:.2e} exceeds tolerance {tol:.1e}; tabulate f further out")
    return 2.0 * (head + tail)


def lemma1_prediction(kappa: float, A: float, log_coeff: float = 1.0) -> float:
    """(pi/2) kappa (a log(1/kappa) + A + a (2 - gamma0 - log 2)) for f whose
    symmetric integral over [-T, T] is T (a log T + A)."""
    a = log_coeff
    return 0.5 * math.pi * kappa * (a * math.log(1.0 / kappa) + A + a * (2.0 - EULER_GAMMA - math.log(2.0)))


def lemma1_B(A: float) -> float:
    return A + 2.0 - EULER_GAMMA - math.log(2.0)


# -- Lemma 2: the kernel K_eta ----------------------------------------------------


def k_eta(x, eta: float):
    """K_eta(x) = (sin 2 pi x + sin 2 pi (1+eta) x) / (2 pi x (1 - 4 eta^2 x^2)).

    Written as (2+eta) sinc((2+eta)x) * (pi/2) sinc(1/2 - |eta x|) / (1 + 2|eta x|),
    which has no removable singularities left."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    x = np.asarray(x, dtype=np.float64)
    y = np.abs(eta * x)
    return (2.0 + eta) * np.sinc((2.0 + eta) * x) * 0.5 * math.pi * np.sinc(0.5 - y) / (1.0 + 2.0 * y)


def k_eta_hat(t, eta: float):
    """Fourier transform of K_eta: 1 on |t| <= 1, cos^2(pi(|t|-1)/(2 eta)) up to 1+eta, then 0."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    t = np.abs(np.asarray(t, dtype=np.float64))
    mid = np.cos(math.pi * (t - 1.0) / (2.0 * eta)) ** 2
    return np.where(t <= 1.0, 1.0, np.where(t >= 1.0 + eta, 0.0, mid))


@lru_cache(maxsize=1)
def _second_derivative_exprs():
    import sympy as sp

    x, e = sp.symbols("x eta", real=True)
    K = (sp.sin(2 * sp.pi * x) + sp.sin(2 * sp.pi * (1 + e) * x)) / (2 * sp.pi * x * (1 - 4 * e**2 * x**2))
    d2 = sp.diff(K, x, 2)
    return sp.lambdify((x, e), d2, "numpy"), sp.lambdify((x, e), d2, "mpmath")


def k_eta_second(x, eta: float, guard: float = 0.05):
    """K_eta''(x) from the symbolic derivative of the closed form; within
    ``guard`` of the removable points x = 0, +-1/(2 eta) it is evaluated in
    40-digit arithmetic (averaged across the point itself)."""
    num, mp = _second_derivative_exprs()
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(x)
    sing = np.array([0.0, 0.5 / eta, -0.5 / eta])
    near = np.min(np.abs(x[:, None] - sing[None, :]), axis=1) < guard
    with np.errstate(all="ignore"):
        out[~near] = num(x[~near], eta)
    if near.any():
        with mpmath.workdps(40):
            for i in np.flatnonzero(near):
                xi = mpmath.mpf(float(x[i]))
                if np.min(np.abs(x[i] - sing)) < 1e-12:
                    h = mpmath.mpf("1e-15")
                    v = (mp(xi + h, mpmath.mpf(eta)) + mp(xi - h, mpmath.mpf(eta))) / 2
                else:
                    v = mp(xi, mpmath.mpf(eta))
                out[i] = float(v)
    return out


def lemma2_rhs(t: float, eta: float, xmax: float = 2000.0) -> float:
    """int_0^xmax K_eta''(x) (sin(pi t x) / (pi t))^2 dx by Gauss-Legendre panels."""
    if t == 0:
        raise ValueError("t must be nonzero")
    width = min(0.05, 0.125 / abs(t))
    edges = np.arange(0.0, xmax + width, width)
    st = math.pi * t
    return _gl(lambda x: k_eta_second(x, eta) * (np.sin(st * x) / st) ** 2, edges)


def lemma2_transform_identity(eta: float, t: float, xmax: float = 2000.0) -> float:
    """int_0^inf K_eta''(x) (sin(pi t x)/(pi t))^2 dx - K_eta_hat(t)."""
    return lemma2_rhs(t, eta, xmax) - float(k_eta_hat(t, eta))


def k_eta_envelope_constant(eta: float, xs=None) -> float:
    """Smallest C with |K_eta''(x)| <= C min{1, eta^-3 |x|^-3} on the grid."""
    if xs is None:
        xs = np.geomspace(1e-2, 1e3, 4000)
    xs = np.asarray(xs, dtype=np.float64)
    env = np.minimum(1.0, eta**-3 * np.abs(xs) ** -3)
    return float(np.max(np.abs(k_eta_second(xs, eta)) / env))


# -- Lemma 3: exponential weights ------------------------------------------------


@dataclass(frozen=True)
class Lemma3Result:
    hypothesis_deviation: float
    conclusion: float


def lemma3_check(f, Y: float, n_shifts: int = 9, romberg_k: int = 12) -> Lemma3Result:
    """Max over T in [Y, Y + log 2] of |int f(T+y) e^{-2|y|} dy - 1|, and
    int_0^{log 2} f(Y+y) e^{2y} dy.

    The conclusion integral is computed as (1/2) int_1^4 f(Y + log(s)/2) ds by
    Romberg integration on 2^k + 1 equally spaced samples (exact for constants).
    """
    fn, span = _tabulated(f)
    lo_need, hi_need = Y - 40.0, Y + 40.0
    if span is not None and (span[0] > lo_need + 1e-9 or span[1] < hi_need - 1e-9):
        raise ValueError(f"f must be tabulated on [{lo_need}, {hi_need}]")
    lo, hi = (span if span is not None else (lo_need, hi_need + math.log(2.0)))
    dev = 0.0
    for T in np.linspace(Y, Y + math.log(2.0), n_shifts):
        a, b = lo - T, hi - T
        g = lambda y, T=T: fn(T + y) * np.exp(-2.0 * np.abs(y))
        left = _gl(g, np.linspace(a, 0.0, int(math.ceil(-a / 0.25)) + 1))
        right = _gl(g, np.linspace(0.0, b, int(math.ceil(b / 0.25)) + 1))
        dev = max(dev, abs(left + right - 1.0))
    s = np.linspace(1.0, 4.0, 2**romberg_k + 1)
    vals = np.asarray(fn(Y + 0.5 * np.log(s)), dtype=np.float64) * np.ones_like(s)
    conclusion = 0.5 * integrate.romb(vals, dx=3.0 / 2**romberg_k)
    return Lemma3Result(float(dev), float(conclusion))
