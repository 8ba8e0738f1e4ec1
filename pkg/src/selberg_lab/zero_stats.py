"""Pair-correlation sums over ingested zero ordinates and the explicit-formula
cross-check for psi_F.

Zero lists are plain text, one ordinate per line, blank lines and '#'
comments ignored.  A reflected list stores positive ordinates of a self-dual
L-function; its signed zero set is {+-gamma} with gamma = 0 counted once.
"""

from __future__ import annotations

import math
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from ._summation import fsum
from .coefficients.tables import CoefficientTable
from .lfunc_registry import LFunctionDescriptor

POISSON_BAND = None  # exact by default: 4/(4+u^2) < 1e-15 only beyond |u| ~ 6.3e7
GAUSS_BAND = 6.0  # exp(-36) < 1e-15


class ZeroFileError(ValueError):
    pass


@dataclass(frozen=True)
class ZeroList:
    ordinates: np.ndarray
    reflect: bool = True
    source: str = ""

    def __post_init__(self):
        g = np.asarray(self.ordinates, dtype=np.float64)
        if g.size and (not np.all(np.isfinite(g)) or np.any(np.diff(g) <= 0)):
            raise ValueError("ordinates must be finite and strictly ascending")
        if self.reflect and g.size and g[0] < 0:
            raise ValueError("a reflected list stores nonnegative ordinates only")
        g.setflags(write=False)
        object.__setattr__(self, "ordinates", g)

    def __len__(self):
        return self.ordinates.size

    def signed(self) -> np.ndarray:
        g = self.ordinates
        if not self.reflect:
            return g.copy()
        pos = g[g > 0]
        neg = -pos[::-1]
        mid = g[g == 0]
        return np.concatenate([neg, mid, pos])

    def window(self, T: float) -> np.ndarray:
        s = self.signed()
        return s[(s >= -T) & (s <= T)]

    def count(self, t0: float, t1: float) -> int:
        """Number of signed ordinates in (t0, t1]."""
        s = self.signed()
        return int(np.searchsorted(s, t1, side="right") - np.searchsorted(s, t0, side="right"))

    @property
    def max_ordinate(self) -> float:
        s = self.signed()
        return float(np.max(np.abs(s))) if s.size else 0.0


def load_zeros(path, reflect: bool = True) -> ZeroList:
    vals = []
    with open(path) as fh:
        prev = None
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise ZeroFileError(f"{path}:{lineno}: not a number: {text!r}") from None
            if not math.isfinite(v):
                raise ZeroFileError(f"{path}:{lineno}: non-finite ordinate")
            if prev is not None and v <= prev:
                raise ZeroFileError(f"{path}:{lineno}: ordinate {v} does not exceed the previous {prev}")
            prev = v
            vals.append(v)
    return ZeroList(np.array(vals, dtype=np.float64), reflect, str(path))


def fetch_zeros(url: str, dest) -> Path:
    """Download a zero list to a local file; computations only read local files."""
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    with urllib.request.urlopen(url) as resp, open(dest, "wb") as out:
        out.write(resp.read())
    return dest


def synth_zeros(kind: str, count: int = 0, spacing: float = 1.0, T: float = 1.0, seed: int = 0, reflect: bool = True) -> ZeroList:
    """Synthetic ordinates: 'picket' gives j * spacing for j = 1..count,
    'uniform' gives count sorted uniform draws from [0, T]."""
    if kind == "picket":
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        g = spacing * np.arange(1, count + 1, dtype=np.float64)
    elif kind == "uniform":
        if T <= 0:
            raise ValueError("T must be positive")
        g = np.sort(np.random.default_rng(seed).uniform(0.0, T, count))
    else:
        raise ValueError(f"unknown synthetic kind {kind!r}")
    return ZeroList(g, reflect, f"synthetic:{kind}")


# -- form factors -----------------------------------------------------------------


@numba.njit(cache=True)
def _pair_sum(g, logx, band, gaussian):
    n = g.size
    total = 0.0
    comp = 0.0
    for i in range(n):
        row = 0.0
        for j in range(i + 1, n):
            u = g[j] - g[i]
            if u > band:
                break
            if gaussian:
                w = math.exp(-u * u)
            else:
                w = 4.0 / (4.0 + u * u)
            row += math.cos(u * logx) * w
        t = total + 2.0 * row
        if abs(total) >= abs(2.0 * row):
            comp += (total - t) + 2.0 * row
        else:
            comp += (2.0 * row - t) + total
        total = t
    return total + comp + n


def f_statistic(zeros: ZeroList, X: float, T: float, band: float | None = POISSON_BAND) -> float:
    """sum over signed ordinates in [-T, T] of X^{i(g - g')} 4/(4 + (g - g')^2)."""
    if X < 1 or T <= 0:
        raise ValueError("need X >= 1 and T > 0")
    g = zeros.window(T)
    if g.size == 0:
        return 0.0
    return float(_pair_sum(g, math.log(X), math.inf if band is None else float(band), False))


def f_tilde(zeros: ZeroList, X: float, T: float, band: float = GAUSS_BAND) -> float:
    """Gaussian-weighted form factor: weight exp(-(g - g')^2)."""
    if X < 1 or T <= 0:
        raise ValueError("need X >= 1 and T > 0")
    g = zeros.window(T)
    if g.size == 0:
        return 0.0
    return float(_pair_sum(g, math.log(X), float(band), True))


# -- quadratures -------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _panel_integral(fn, a: float, b: float, width: float) -> float:
    n = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, n + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    weights = (half[:, None] * _GL_W[None, :]).ravel()
    return fsum(weights * fn(nodes))


def _adaptive(fn, a: float, b: float, width: float, rtol: float, max_halvings: int = 8) -> float:
    prev = _panel_integral(fn, a, b, width)
    for _ in range(max_halvings):
        width /= 2.0
        cur = _panel_integral(fn, a, b, width)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise RuntimeError(f"quadrature did not reach relative tolerance {rtol}")


def _poisson_sum(t, g, c, chunk=4096):
    out = np.empty(t.size, dtype=np.complex128)
    for s in range(0, t.size, chunk):
        tt = t[s : s + chunk]
        out[s : s + chunk] = (c[None, :] / (1.0 + (tt[:, None] - g[None, :]) ** 2)).sum(axis=1)
    return out


def i_integral(zeros: ZeroList, X: float, T: float, Z: float, rtol: float = 1e-6, coeffs=None) -> float:
    """int_{-T}^{T} |sum_{|g| <= Z} c_g X^{ig} / (1 + (t - g)^2)|^2 dt with c_g = 1
    unless explicit coefficients are given."""
    if Z < T:
        raise ValueError("need Z >= T")
    g = zeros.signed()
    sel = np.abs(g) <= Z
    g = g[sel]
    if g.size == 0:
        return 0.0
    c = np.exp(1j * g * math.log(X))
    if coeffs is not None:
        c = c * np.asarray(coeffs)[sel]
    return _adaptive(lambda t: np.abs(_poisson_sum(t, g, c)) ** 2, -T, T, 0.5, rtol)


def a_weight(rho, delta: float):
    """a(s) = ((1 + delta)^s - 1) / s."""
    return np.expm1(rho * math.log1p(delta)) / rho


def plancherel_pair(zeros: ZeroList, X: float, delta: float, Z: float, rtol: float = 1e-7):
    """Both sides of the Plancherel identity

        int |sum a(rho) X^{ig} / (1 + (t - g)^2)|^2 dt
            = (pi/2) int |sum a(rho) e^{ig(Y + y)}|^2 e^{-2|y|} dy,  Y = log X,

    each by direct quadrature with its own truncation (t within 400 of the
    zeros, |y| <= 20)."""
    g = zeros.signed()
    g = g[np.abs(g) <= Z]
    if g.size == 0:
        return 0.0, 0.0
    a = a_weight(0.5 + 1j * g, delta)
    Y = math.log(X)
    c = a * np.exp(1j * g * Y)
    lo, hi = float(g.min()) - 400.0, float(g.max()) + 400.0
    t_form = _adaptive(lambda t: np.abs(_poisson_sum(t, g, c)) ** 2, lo, hi, 0.5, rtol)

    def yfun(y):
        out = np.empty(y.size)
        for s in range(0, y.size, 4096):
            yy = y[s : s + 4096]
            S = (c[None, :] * np.exp(1j * g[None, :] * yy[:, None])).sum(axis=1)
            out[s : s + 4096] = np.abs(S) ** 2 * np.exp(-2.0 * np.abs(yy))
        return out

    width = min(0.5, 0.5 / max(1.0, float(np.abs(g).max())) * 20)
    y_form = 0.5 * math.pi * (_adaptive(yfun, -20.0, 0.0, width, rtol) + _adaptive(yfun, 0.0, 20.0, width, rtol))
    return t_form, y_form


# -- explicit formula ---------------------------------------------------------------


@dataclass(frozen=True)
class ExplicitResidual:
    residual: float
    lhs: float
    zero_sum: float
    envelope: float


def _dist_to_int(x: float) -> float:
    return abs(x - round(x))


def error_envelope(x: float, delta: float, Z: float) -> float:
    """(log x) min{1, x/(Z||x||)} + (log x) min{1, x/(Z||x(1+delta)||)} + x Z^{-1} (log xZ)^2."""
    if Z <= 0:
        return math.inf
    lx = math.log(x)

    def piece(y):
        d = _dist_to_int(y)
        return lx if d == 0 else lx * min(1.0, x / (Z * d))

    return piece(x) + piece(x * (1.0 + delta)) + x / Z * math.log(x * Z) ** 2


def explicit_formula_residual(
    desc: LFunctionDescriptor, table: CoefficientTable, zeros: ZeroList, x: float, delta: float, Z: float
) -> ExplicitResidual:
    """psi_F(x + delta x) - psi_F(x) - m_F delta x + sum_{|g| <= Z} a(rho) x^rho."""
    if x < 2:
        raise ValueError("x must be at least 2")
    if x * (1.0 + delta) > table.N:
        raise ValueError("x (1 + delta) is beyond the coefficient table")
    if Z > 0 and (len(zeros) == 0 or zeros.max_ordinate < Z * (1 - 1e-12)):
        raise ValueError(f"zero list stops at {zeros.max_ordinate:.6g} < Z = {Z}")
    lhs = float(table.psi(x * (1.0 + delta)) - table.psi(x)) - desc.pole_order * delta * x
    g = zeros.signed()
    g = g[np.abs(g) <= Z]
    if g.size:
        rho = 0.5 + 1j * g
        terms = a_weight(rho, delta) * np.exp(rho * math.log(x))
        zsum = fsum(terms.real)
    else:
        zsum = 0.0
    return ExplicitResidual(lhs + zsum, lhs, -zsum, error_envelope(x, delta, Z))
