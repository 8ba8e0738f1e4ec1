"""Arithmetic factors built from Euler products: the Rankin-Selberg square
(F x Fbar)(s), its residue at s = 1, the factors A_F(r) and B_F(r), the closed
forms A(r), B(r) for zeta, the pair-correlation density g(eta, t) and the
two-branch main term for the smoothed form factor.

Near s = 1 the square is always written as zeta(s) H(s) with

    log H(s) = sum_p sum_l (|s_l(p)|^2 - 1) / l * p^{-ls},

where s_l(p) = alpha^l + beta^l are the Satake power sums.  zeta carries the
pole exactly and H is a truncated product that stays finite at s = 1, so the
residue of the truncated square is H_P(1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import exp1

from ._summation import csum, fsum
from .coefficients.sieve import primes_up_to
from .coefficients.tables import PrimeCoefficientTable, prime_coefficients, satake_power_table
from .lfunc_registry import LOG_2PI, LFunctionDescriptor

TINY = 1e-20  # local terms below this (relative) are dropped


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TruncationPolicy:
    P: int = 100_000
    L: int = 8
    eps: float = 1e-2

    def __post_init__(self):
        if self.P < 100:
            raise ValueError("prime cutoff P must be at least 100")
        if self.L < 4:
            raise ValueError("local exponent cutoff L must be at least 4")
        if not self.eps > 0:
            raise ValueError("principal-value radius must be positive")


@dataclass(frozen=True)
class EulerProductValue:
    value: complex
    P: int
    L: int
    tail: float  # truncation remainder estimate (signed for B_F, a magnitude otherwise)
    drift: float = 0.0  # relative change against the same product truncated at P/2

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class ResidueEstimate:
    value: float
    spread: float  # relative gap between the last two Richardson columns
    drift: float  # relative change when P is halved
    levels: int

    def __float__(self):
        return float(self.value)


class LocalData:
    """Per-prime a_F(p), bad flags and log p up to the cutoff."""

    def __init__(self, desc: LFunctionDescriptor, P: int, table: PrimeCoefficientTable | None = None):
        if table is None:
            table = prime_coefficients(desc, P)
        elif table.P < P:
            raise ValueError(f"coefficient table stops at {table.P} < {P}")
        sel = table.primes <= P
        self.desc = desc
        self.P = int(P)
        self.primes = table.primes[sel]
        self.a = table.values[sel]
        self.bad = table.bad[sel]
        self.logp = np.log(self.primes.astype(np.float64))
        d = desc.degree
        if abs(d - 2.0) < 1e-9:
            self.degree_two = True
        elif abs(d - 1.0) < 1e-9:
            self.degree_two = False
        else:
            raise ValueError(f"local factors for degree {d} are not built in")
        self._sat = {}

    def satake(self, lmax: int) -> np.ndarray:
        """Rows l = 0..lmax of s_l(p)."""
        cached = self._sat.get("s")
        if cached is None or cached.shape[0] <= lmax:
            cached = satake_power_table(self.a, self.bad, max(lmax, 8), self.degree_two)
            self._sat["s"] = cached
        return cached[: lmax + 1]

    def local_coeffs(self, mmax: int) -> np.ndarray:
        """Rows m = 0..mmax of a_F(p^m)."""
        cached = self._sat.get("a")
        if cached is None or cached.shape[0] <= mmax:
            n = max(mmax, 8)
            out = np.empty((n + 1, self.a.size), dtype=self.a.dtype)
            out[0] = 1.0
            out[1] = self.a
            for m in range(2, n + 1):
                out[m] = out[m - 1] * self.a
            if self.degree_two:
                good = ~self.bad
                rec = np.empty_like(out)
                rec[0], rec[1] = 1.0, self.a
                for m in range(2, n + 1):
                    rec[m] = self.a * rec[m - 1] - rec[m - 2]
                out[:, good] = rec[:, good]
            cached = out
            self._sat["a"] = cached
        return cached[: mmax + 1]

    def mu(self) -> np.ndarray:
        """Rows h = 0..2 of mu_F(p^h)."""
        out = np.zeros((3, self.a.size), dtype=self.a.dtype)
        out[0] = 1.0
        out[1] = -self.a
        if self.degree_two:
            out[2] = np.where(self.bad, 0.0, 1.0)
        return out

    def exponent_cutoff(self, margin: float, L: int) -> int:
        """Smallest M >= L with 2^{-margin M} (M + 1)^2 < TINY (worst prime is p = 2)."""
        if margin <= 0:
            raise ValueError("local series diverges for this argument")
        M = L
        while 2.0 ** (-margin * M) * (M + 1) ** 2 >= TINY:
            M += 1
        return M


@lru_cache(maxsize=16)
def _local_data(desc: LFunctionDescriptor, P: int) -> LocalData:
    return LocalData(desc, P)


def _data(desc, policy, table) -> LocalData:
    if table is not None:
        return LocalData(desc, policy.P, table)
    return _local_data(desc, policy.P)


def _prime_sum(terms: np.ndarray, primes: np.ndarray, P: int):
    """(sum over p <= P, sum over p <= P/2) of per-prime complex terms."""
    half = primes <= P // 2
    return csum(terms), csum(terms[half])


def _log_square_terms(data: LocalData, s: complex, L: int, subtract_zeta: bool) -> np.ndarray:
    """Per-prime sum_l (|s_l|^2 [- 1]) / l * p^{-ls}."""
    sigma = s.real
    M = data.exponent_cutoff(sigma, L)
    sat = data.satake(M)
    out = np.zeros(data.primes.size, dtype=np.complex128)
    for l in range(1, M + 1):
        w = np.exp(-l * s * data.logp)
        live = np.abs(w) > TINY
        if not live.any():
            break
        c = np.abs(sat[l, live]) ** 2
        if subtract_zeta:
            c = c - 1.0
        out[live] += c / l * w[live]
    return out


def _tail(data: LocalData, sigma: float) -> float:
    # sum_{p > P} p^{-sigma} ~ E1((sigma - 1) log P) by the prime number theorem
    x = (sigma - 1.0) * math.log(data.P)
    return float(exp1(x)) if x < 700 else 0.0


def tensor_product_FxF(desc: LFunctionDescriptor, s: complex, policy: TruncationPolicy = TruncationPolicy(), table=None) -> EulerProductValue:
    """Truncated (F x Fbar)(s) = prod_p exp(sum_l l |b_F(p^l)|^2 p^{-ls}) for Re(s) > 1."""
    s = complex(s)
    if s.real <= 1.0:
        raise ValueError("the truncated product is only evaluated for Re(s) > 1")
    data = _data(desc, policy, table)
    terms = _log_square_terms(data, s, policy.L, subtract_zeta=False)
    full, half = _prime_sum(terms, data.primes, data.P)
    value = complex(np.exp(full))
    drift = abs(np.exp(full - half) - 1.0)
    tail = abs(value) * _tail(data, s.real)
    return EulerProductValue(value, data.P, policy.L, tail, float(drift))


def square_over_zeta_log(desc, s: complex, policy: TruncationPolicy = TruncationPolicy(), table=None):
    """(log H_P(s), log H_{P/2}(s)) for the zeta-divided square."""
    s = complex(s)
    data = _data(desc, policy, table)
    if s.real < 1.0:
        raise ValueError("H is only summed for Re(s) >= 1")
    terms = _log_square_terms(data, s, policy.L, subtract_zeta=True)
    return _prime_sum(terms, data.primes, data.P)


def _pole_diagnostic(data: LocalData) -> float:
    sel = data.primes > data.P // 2
    return float(np.mean(np.abs(data.a[sel]) ** 2))


def residue_FxF(desc: LFunctionDescriptor, policy: TruncationPolicy = TruncationPolicy(), levels: int = 8, table=None) -> ResidueEstimate:
    """Residue of (F x Fbar) at s = 1 by Richardson extrapolation of
    (sigma - 1) zeta(sigma) H_P(sigma) along sigma = 1 + 2^{-j}."""
    data = _data(desc, policy, table)
    mean_sq = _pole_diagnostic(data)
    if not 0.75 <= mean_sq <= 1.25:
        raise ConvergenceError(
            f"mean |a_F(p)|^2 over ({data.P // 2}, {data.P}] is {mean_sq:.3g}; "
            "the square has no simple pole at s = 1 at this cutoff"
        )
    rows_full, rows_half = [], []
    for j in range(1, levels + 1):
        sig = 1.0 + 2.0**-j
        zf = float(mpmath.zeta(sig)) * (sig - 1.0)
        lf, lh = square_over_zeta_log(desc, sig, policy, table)
        rows_full.append(zf * math.exp(lf.real))
        rows_half.append(zf * math.exp(lh.real))

    def richardson(vals):
        T = [list(vals)]
        for k in range(1, len(vals)):
            prev = T[-1]
            f = 2.0**k
            T.append([(f * prev[i + 1] - prev[i]) / (f - 1.0) for i in range(len(prev) - 1)])
        best = T[-1][0]
        second = T[-2][-1] if len(T) > 1 else best
        return best, abs(best - second) / max(abs(best), 1e-300)

    value, spread = richardson(rows_full)
    half_value, _ = richardson(rows_half)
    if spread > 0.10 or not math.isfinite(value):
        raise ConvergenceError(f"residue extrapolation spread {spread:.3g} exceeds 10%")
    drift = abs(value - half_value) / abs(value)
    return ResidueEstimate(value, spread, drift, levels)


# -- A_F and B_F ----------------------------------------------------------------


def _local_A_sum(data: LocalData, r: complex, L: int) -> np.ndarray:
    """Per-prime sum_{h+m=k+n} a(p^m) conj a(p^n) mu(p^h) conj mu(p^k) p^{rm - n - (1+r)k}."""
    margin = 1.0 - abs(r.real)
    M = data.exponent_cutoff(margin, L)
    A = data.local_coeffs(M + 2)
    Ac = np.conj(A)
    mu = data.mu()
    muc = np.conj(mu)
    logp = data.logp
    total = np.zeros(data.primes.size, dtype=np.complex128)
    for h in range(3):
        for k in range(3):
            coef = mu[h] * muc[k]
            if not np.any(coef):
                continue
            for m in range(max(0, k - h), M + 1):
                n = h + m - k
                expo = (r * m - n - (1.0 + r) * k) * logp
                w = np.exp(expo)
                live = np.abs(w) > TINY
                if not live.any():
                    break
                total[live] += coef[live] * A[m, live] * Ac[n, live] * w[live]
    return total


def _local_A_exp(data: LocalData, r: complex, L: int) -> np.ndarray:
    margin = 1.0 - abs(r.real)
    M = data.exponent_cutoff(margin, L)
    sat = data.satake(M)
    out = np.zeros(data.primes.size, dtype=np.complex128)
    for l in range(1, M + 1):
        w = 2.0 * np.exp(-l * data.logp) - np.exp(-l * (1.0 - r) * data.logp) - np.exp(-l * (1.0 + r) * data.logp)
        live = np.abs(w) > TINY
        if not live.any():
            break
        out[live] += np.abs(sat[l, live]) ** 2 / l * w[live]
    return out


def a_f(desc: LFunctionDescriptor, r: complex, policy: TruncationPolicy = TruncationPolicy(), table=None) -> EulerProductValue:
    """A_F(r) for |Re r| < 1/4."""
    r = complex(r)
    if abs(r.real) >= 0.25:
        raise ValueError("A_F(r) needs |Re r| < 1/4")
    data = _data(desc, policy, table)
    S = _local_A_sum(data, r, policy.L)
    if np.any(np.abs(S) < 1e-12):
        raise ConvergenceError("a local factor of A_F vanished; exponent cutoff too small")
    terms = np.log(S) + _local_A_exp(data, r, policy.L)
    full, half = _prime_sum(terms, data.primes, data.P)
    value = complex(np.exp(full))
    tail = abs(value) * float(np.max(np.abs(terms[-min(50, terms.size):]))) * data.P / math.log(data.P) / data.P
    return EulerProductValue(value, data.P, policy.L, tail, float(abs(np.exp(full - half) - 1.0)))


def b_f(desc: LFunctionDescriptor, r: complex, policy: TruncationPolicy = TruncationPolicy(), table=None) -> EulerProductValue:
    """B_F(r) for Re r > -1/2."""
    r = complex(r)
    if r.real <= -0.5:
        raise ValueError("B_F(r) needs Re r > -1/2")
    data = _data(desc, policy, table)
    margin = 1.0 + r.real
    M = data.exponent_cutoff(margin, policy.L)
    A = data.local_coeffs(M + 2)
    Ac = np.conj(A)
    mu = data.mu()
    muc = np.conj(mu)
    logp = data.logp
    per = np.zeros(data.primes.size, dtype=np.complex128)
    for h in range(3):
        for k in range(3):
            coef = mu[h] * muc[k]
            if not np.any(coef):
                continue
            for n in range(0, M + 1):
                m = k + n - h
                if m < 0:
                    continue
                w = np.exp(-(n + k) * (1.0 + r) * logp)
                live = np.abs(w) > TINY
                if not live.any():
                    break
                per[live] -= coef[live] * A[m, live] * Ac[n, live] * (m * n) * w[live]
    sat = data.satake(M)
    for l in range(1, M + 1):
        w = np.exp(-l * (1.0 + r) * logp)
        live = np.abs(w) > TINY
        if not live.any():
            break
        per[live] += l * np.abs(sat[l, live]) ** 2 * w[live]
    terms = logp**2 * per
    full, half = _prime_sum(terms, data.primes, data.P)
    # remainder: the p^{-2(1+r)} coefficient averaged over (P/2, P] times the PNT tail
    top = data.primes > data.P // 2
    scale = float(np.mean(per[top].real * np.exp(2.0 * (1.0 + r.real) * logp[top]))) if top.any() else 1.0
    tail = scale * b_tail(data.P, r.real)
    return EulerProductValue(full, data.P, policy.L, tail, float(abs(full - half) / max(abs(full), 1e-300)))


def b_tail(P: int, sigma_shift: float = 0.0) -> float:
    """sum_{p > P} (log p)^2 p^{-2(1 + sigma)} by the prime number theorem
    (the leading surviving terms of B at large p are |a_p|^4-free second powers)."""
    # int_P^inf (log t) t^{-2-2s} dt
    a = 1.0 + 2.0 * sigma_shift
    return (math.log(P) / a + 1.0 / a**2) * P ** (-a)


@lru_cache(maxsize=8)
def _zeta_primes(P: int):
    p = primes_up_to(P).astype(np.float64)
    return p, np.log(p)


def zeta_A(r: complex, P: int = 100_000) -> complex:
    """prod_p (1 - p^{-1-r})(1 - 2/p + p^{-1-r}) / (1 - 1/p)^2."""
    r = complex(r)
    if abs(r.real) >= 0.25:
        raise ValueError("A(r) needs |Re r| < 1/4")
    p, logp = _zeta_primes(P)
    x = np.exp(-(1.0 + r) * logp)
    terms = np.log1p(-x) + np.log(1.0 - 2.0 / p + x) - 2.0 * np.log1p(-1.0 / p)
    return complex(np.exp(csum(terms)))


def zeta_B(r: complex, P: int = 100_000) -> complex:
    """sum_p (log p / (p^{1+r} - 1))^2."""
    r = complex(r)
    if r.real <= -0.5:
        raise ValueError("B(r) needs Re r > -1/2")
    p, logp = _zeta_primes(P)
    x = np.exp((1.0 + r) * logp)
    return csum((logp / (x - 1.0)) ** 2)


# -- the pair-correlation density ---------------------------------------------


def log_conductor_height(desc: LFunctionDescriptor, t: float) -> float:
    """l(t) = log(q_F (|t| + 2)^{d_F} / (2 pi)^{d_F})."""
    d = desc.degree
    return desc.log_conductor + d * (math.log(abs(t) + 2.0) - LOG_2PI)


@dataclass(frozen=True)
class RCSValue:
    value: complex
    drift: float
    regularized: bool

    def __complex__(self):
        return complex(self.value)


def _zeta_log_second(s: complex) -> complex:
    z = mpmath.zeta(s)
    z1 = mpmath.zeta(s, 1, 1)
    z2 = mpmath.zeta(s, 1, 2)
    return complex((z2 * z - z1 * z1) / (z * z))


def _log_H_second(desc, s, policy, table):
    """(log H)''(s) over p <= P and p <= P/2."""
    data = _data(desc, policy, table)
    M = data.exponent_cutoff(s.real, policy.L)
    sat = data.satake(M)
    out = np.zeros(data.primes.size, dtype=np.complex128)
    for l in range(1, M + 1):
        w = np.exp(-l * s * data.logp)
        live = np.abs(w) > TINY
        if not live.any():
            break
        out[live] += (np.abs(sat[l, live]) ** 2 - 1.0) * l * data.logp[live] ** 2 * w[live]
    return _prime_sum(out, data.primes, data.P)


def _raw_g(desc, eta: float, t: float, policy, table):
    sp = complex(1.0, eta)
    sm = complex(1.0, -eta)
    ell = log_conductor_height(desc, t)
    h_full, h_half = _log_H_second(desc, sp, policy, table)
    lp_full, lp_half = square_over_zeta_log(desc, sp, policy, table)
    lm_full, lm_half = square_over_zeta_log(desc, sm, policy, table)
    l1_full, l1_half = square_over_zeta_log(desc, 1.0, policy, table)
    zp = complex(mpmath.zeta(sp))
    zm = complex(mpmath.zeta(sm))
    Ar = a_f(desc, complex(0.0, eta), policy, table).value
    Br = b_f(desc, complex(0.0, eta), policy, table).value
    zlog2 = _zeta_log_second(sp)
    phase = complex(math.cos(eta * ell), -math.sin(eta * ell))

    def assemble(hsec, lp, lm, l1):
        # r = H_P(1) is the residue of the truncated square
        ratio = np.exp(lp + lm - 2.0 * l1)
        return zlog2 + hsec + phase * Ar * zp * zm * ratio - Br

    g = assemble(h_full, lp_full, lm_full, l1_full)
    g_half = assemble(h_half, lp_half, lm_half, l1_half)
    return complex(g), abs(g - g_half) / max(abs(g), 1e-300)


def rcs_integrand(
    desc: LFunctionDescriptor,
    eta: float,
    t: float,
    policy: TruncationPolicy = TruncationPolicy(),
    principal_value: bool = False,
    table=None,
) -> RCSValue:
    """g(eta, t) of the ratios-conjecture pair-correlation density.

    With ``principal_value`` set and |eta| < eps the pole -i l(t)/eta is
    removed and the bounded remainder, linearly interpolated from eta = +-eps,
    is returned; the pole itself integrates to zero against even test
    functions.
    """
    eta = float(eta)
    if principal_value and abs(eta) < policy.eps:
        ell = log_conductor_height(desc, t)
        gp, dp = _raw_g(desc, policy.eps, t, policy, table)
        gm, dm = _raw_g(desc, -policy.eps, t, policy, table)
        rp = gp + 1j * ell / policy.eps
        rm = gm - 1j * ell / policy.eps
        lam = (eta + policy.eps) / (2.0 * policy.eps)
        return RCSValue(complex(rm + lam * (rp - rm)), max(dp, dm), True)
    if eta == 0.0:
        raise ValueError("g has a pole at eta = 0; pass principal_value=True")
    g, drift = _raw_g(desc, eta, t, policy, table)
    if drift > 1e-3:
        warnings.warn(f"g({eta}, {t}) moved by {drift:.2e} relative when P was halved", RuntimeWarning, stacklevel=2)
    return RCSValue(g, drift, False)


def form_factor_prediction(desc: LFunctionDescriptor, X: float, T: float) -> float:
    """Main term of the smoothed form factor: T log X / pi when X < T^{d_F},
    (T/pi)(d_F log(T/2pi) + log q_F - d_F) otherwise."""
    if T <= 2.0 * math.pi:
        raise ValueError("T must exceed 2 pi")
    d = desc.degree
    if math.log(X) < d * math.log(T):
        return T * math.log(X) / math.pi
    return (T / math.pi) * (d * math.log(T / (2.0 * math.pi)) + desc.log_conductor - d)
