"""Exact short-interval variances

    V~_F(X, h)    = int_1^X |psi_F(x + h) - psi_F(x) - m_F h|^2 dx
    V_F(X, delta) = int_1^X |psi_F(x + delta x) - psi_F(x) - m_F delta x|^2 dx

psi_F is a step function, so both integrands are piecewise polynomial in x
(constant for V~, linear for V) and integrate in closed form between
consecutive jumps.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._summation import fsum
from .coefficients.tables import CoefficientTable


@dataclass(frozen=True)
class VarianceResult:
    kind: str  # "tilde" or "delta"
    X: float
    param: float  # h for "tilde", delta for "delta"
    value: float
    normalized: float

    @property
    def log_ratio(self) -> float:
        """log(X/h), or log(1/delta) for the delta form."""
        if self.kind == "tilde":
            return math.log(self.X / self.param)
        return -math.log(self.param)


@dataclass
class VarianceCurve:
    X: float
    kind: str
    points: list[VarianceResult]
    desc_name: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        xs = [r.param for r in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("variance grid must be strictly increasing")

    def __len__(self):
        return len(self.points)

    def arrays(self):
        lr = np.array([r.log_ratio for r in self.points])
        return lr, np.array([r.normalized for r in self.points])

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("X,h_or_delta,value,normalized,log_X_over_h\n")
            for r in self.points:
                fh.write(f"{r.X:.16e},{r.param:.16e},{r.value:.16e},{r.normalized:.16e},{r.log_ratio:.16e}\n")


def _check_range(table: CoefficientTable, top: float):
    if math.floor(top) > table.N:
        raise ValueError(f"interval reaches {top:.6g} but the table stops at {table.N}")


def v_tilde(table: CoefficientTable, X: float, h: float) -> VarianceResult:
    if not 1.0 <= h <= X:
        raise ValueError(f"need 1 <= h <= X, got h = {h}, X = {X}")
    _check_range(table, X + h)
    psi = table.psi_prefix
    m = float(table.pole_order)
    H = int(math.floor(h))
    theta = h - H
    n = np.arange(1, int(math.ceil(X)), dtype=np.int64)
    if n.size == 0:
        return VarianceResult("tilde", X, h, 0.0, 0.0)
    right = np.minimum(n + 1.0, X)
    top = table.N
    f1 = psi[np.minimum(n + H, top)] - psi[n] - m * h
    if theta == 0.0:
        w1 = right - n
        pieces = w1 * f1 * f1
    else:
        cut = np.minimum(n + 1.0 - theta, right)
        w1 = cut - n
        w2 = right - cut
        f2 = psi[np.minimum(n + H + 1, top)] - psi[n] - m * h
        pieces = np.concatenate([w1 * f1 * f1, w2 * f2 * f2])
    value = fsum(pieces)
    return VarianceResult("tilde", X, h, value, value / (h * X))


def _delta_breakpoints(X: float, delta: float) -> np.ndarray:
    ints = np.arange(1, int(math.floor(X)) + 1, dtype=np.float64)
    q = 1.0 + delta
    m = np.arange(int(math.floor(q)) + 1, int(math.ceil(X * q)) + 1, dtype=np.float64)
    shifted = m / q
    pts = np.concatenate([[1.0, X], ints, shifted])
    pts = pts[(pts >= 1.0) & (pts <= X)]
    return np.unique(pts)


def v_delta(table: CoefficientTable, X: float, delta: float) -> VarianceResult:
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"need 0 < delta <= 1, got {delta}")
    if X < 1.0:
        raise ValueError("X must be at least 1")
    _check_range(table, X * (1.0 + delta))
    psi = table.psi_prefix
    k = float(table.pole_order) * delta
    b = _delta_breakpoints(X, delta)
    if b.size < 2:
        return VarianceResult("delta", X, delta, 0.0, 0.0)
    a, e = b[:-1], b[1:]
    w = e - a
    mid = 0.5 * (a + e)
    lo = np.floor(mid).astype(np.int64)
    hi = np.minimum(np.floor(mid * (1.0 + delta)).astype(np.int64), table.N)
    c = psi[hi] - psi[lo]
    g = c - k * mid
    value = fsum(w * g * g) + fsum(k * k * w**3 / 12.0)
    return VarianceResult("delta", X, delta, value, value / (delta * X * X))


def log_spaced_h(X: float, log_ratio_min: float, log_ratio_max: float, count: int) -> np.ndarray:
    """h values, ascending, with log(X/h) evenly spaced in [min, max]."""
    if count == 0:
        return np.zeros(0)
    u = np.linspace(log_ratio_max, log_ratio_min, count)
    return X * np.exp(-u)


def variance_curve(table: CoefficientTable, X: float, grid, kind: str = "tilde") -> VarianceCurve:
    grid = [float(g) for g in np.atleast_1d(np.asarray(grid, dtype=np.float64))]
    fn = {"tilde": v_tilde, "delta": v_delta}.get(kind)
    if fn is None:
        raise ValueError(f"unknown variance kind {kind!r}")
    start = time.time()
    points = [fn(table, X, g) for g in grid]
    meta = {"N": table.N, "table_meta": dict(table.meta), "seconds": time.time() - start, "timestamp": time.time()}
    return VarianceCurve(X, kind, points, table.desc_name, meta)


def fit_line(curve_or_x, y=None, window=None):
    """Least-squares (slope, intercept) of normalized value against log(X/h)."""
    if y is None:
        x, y = curve_or_x.arrays()
    else:
        x = np.asarray(curve_or_x)
        y = np.asarray(y)
    if window is not None:
        sel = (x >= window[0]) & (x <= window[1])
        x, y = x[sel], y[sel]
    if x.size < 2:
        raise ValueError("need at least two points to fit")
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)
