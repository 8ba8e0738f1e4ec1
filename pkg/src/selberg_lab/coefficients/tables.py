"""Prime coefficients a_F(p), prime-power data Lambda_F(p^k), mu_F(p^k) and
prefix sums psi_F for the built-in and tabulated L-functions."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .._summation import compensated_cumsum, fsum
from ..lfunc_registry import LFunctionDescriptor
from . import cache, elliptic
from .sieve import prime_power_index, primes_up_to, von_mangoldt_sieve
from .tau import TauExpansion, normalized_tau

DEFAULT_BUDGET_P = 3_000_000
BUDGET_ENV = "SELBERG_LAB_MAX_P"


class BudgetError(RuntimeError):
    """Requested cutoff needs more fresh computation than allowed."""


@dataclass(frozen=True)
class PrimeCoefficientTable:
    desc_name: str
    P: int
    primes: np.ndarray
    values: np.ndarray
    bad: np.ndarray

    def __post_init__(self):
        for arr in (self.primes, self.values, self.bad):
            arr.setflags(write=False)

    def __len__(self):
        return self.primes.size

    def index(self, p: int) -> int:
        i = int(np.searchsorted(self.primes, p))
        if i >= self.primes.size or self.primes[i] != p:
            raise KeyError(f"{p} is not a prime <= {self.P}")
        return i

    def value(self, p: int):
        return self.values[self.index(p)]

    def is_bad(self, p: int) -> bool:
        return bool(self.bad[self.index(p)])

    def truncate(self, P: int) -> "PrimeCoefficientTable":
        n = int(np.searchsorted(self.primes, P, side="right"))
        return PrimeCoefficientTable(self.desc_name, P, self.primes[:n].copy(), self.values[:n].copy(), self.bad[:n].copy())


@dataclass(frozen=True)
class CoefficientTable:
    """Lambda_F(n) and psi_F(n) for 0 <= n <= N (index 0 is a zero pad)."""

    desc_name: str
    N: int
    lambda_values: np.ndarray
    psi_prefix: np.ndarray
    pole_order: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lambda_values.setflags(write=False)
        self.psi_prefix.setflags(write=False)

    @classmethod
    def from_lambda(cls, name, lam, pole_order=0, **meta):
        lam = np.asarray(lam, dtype=np.float64)
        lam[0] = 0.0
        return cls(name, lam.size - 1, lam, compensated_cumsum(lam), int(pole_order), dict(meta))

    def psi(self, x):
        """psi_F(x) for real x (vectorized); psi_F(x) = 0 for x < 1."""
        idx = np.floor(np.asarray(x, dtype=np.float64)).astype(np.int64)
        if np.any(idx > self.N):
            raise ValueError(f"x exceeds the table length {self.N}")
        return np.where(idx >= 1, self.psi_prefix[np.clip(idx, 0, self.N)], 0.0)

    def to_csv(self, path) -> None:
        n = np.flatnonzero(self.lambda_values)
        with open(path, "w") as fh:
            fh.write("n,lambda\n")
            for k, v in zip(n.tolist(), self.lambda_values[n].tolist()):
                fh.write(f"{k},{v:.16e}\n")


# -- prime coefficients -----------------------------------------------------


def _budget() -> int:
    return int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET_P))


def _read_external(path: str, P: int):
    path = Path(path)
    if path.suffix == ".bin":
        primes, values, bad = cache.read_records(path)
    else:
        rows = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.replace(",", " ").split()
                try:
                    p = int(parts[0])
                    v = float(parts[1])
                    b = len(parts) > 2 and parts[2].lower() in ("1", "bad", "true")
                except (ValueError, IndexError) as exc:
                    raise ValueError(f"{path}:{lineno}: expected 'p value [bad]'") from exc
                rows.append((p, v, b))
        primes = np.array([r[0] for r in rows], dtype=np.int64)
        values = np.array([r[1] for r in rows], dtype=np.float64)
        bad = np.array([r[2] for r in rows], dtype=bool)
    want = primes_up_to(P)
    have = primes[primes <= P]
    if have.size != want.size or np.any(have != want):
        raise ValueError(f"external table {path} does not list every prime up to {P}")
    n = want.size
    return primes[:n], values[:n], bad[:n]


def _compute(desc: LFunctionDescriptor, P: int, parallel: bool, method: str):
    src = desc.source
    primes = primes_up_to(P)
    bad = np.isin(primes, sorted(desc.bad_primes))
    if src.kind == "riemann_zeta":
        return primes, np.ones(primes.size), bad
    if src.kind == "ramanujan_delta":
        exp = TauExpansion(P)
        vals = np.array([normalized_tau(exp.tau(p), p) for p in primes.tolist()])
        return primes, vals, bad
    if src.kind == "elliptic_curve":
        ap = elliptic.traces(src.a_invariants, primes, method=method, parallel=parallel, bad=desc.bad_primes)
        return primes, ap / np.sqrt(primes.astype(np.float64)), bad
    raise ValueError(f"no generator for coefficient source {src.kind!r}")


def prime_coefficients(
    desc: LFunctionDescriptor,
    P: int,
    *,
    use_cache: bool = True,
    parallel: bool = False,
    method: str = "table",
    budget: int | None = None,
) -> PrimeCoefficientTable:
    """Normalized a_F(p) for every prime p <= P."""
    if P < 2:
        raise ValueError("P must be at least 2")
    P = int(P)
    src = desc.source
    if src.kind == "external_table":
        primes, values, bad = _read_external(src.path, P)
        bad = bad | np.isin(primes, sorted(desc.bad_primes))
        return PrimeCoefficientTable(desc.name, P, primes, values, bad)
    if src.kind == "riemann_zeta":
        primes, values, bad = _compute(desc, P, parallel, method)
        return PrimeCoefficientTable(desc.name, P, primes, values, bad)
    key = src.cache_key()
    hit = cache.load(key, P) if use_cache else None
    if hit is None:
        limit = _budget() if budget is None else budget
        if P > limit:
            raise BudgetError(
                f"P = {P} exceeds the uncached compute budget {limit} for {desc.name}; "
                f"raise {BUDGET_ENV} or prebuild the cache with 'selberg-lab coeffs'"
            )
        hit = _compute(desc, P, parallel, method)
        if use_cache:
            cache.store(key, P, *hit)
    primes, values, bad = hit
    return PrimeCoefficientTable(desc.name, P, primes, values, bad)


# -- local data at a prime ----------------------------------------------------


def _good_degree_two(desc: LFunctionDescriptor, bad: bool) -> bool:
    if bad:
        return False
    d = desc.degree
    if abs(d - 1.0) < 1e-9:
        return False
    if abs(d - 2.0) < 1e-9:
        return True
    raise ValueError(f"local factors for degree {d} are not built in")


def satake_power(a, k: int, bad: bool = False, degree_two: bool = True):
    """alpha^k + beta^k at a good degree-2 prime, a^k otherwise."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if bad or not degree_two:
        return a**k
    s_prev, s = 2.0 + 0.0 * a, a
    if k == 0:
        return s_prev
    for _ in range(k - 1):
        s_prev, s = s, a * s - s_prev
    return s


def satake_power_table(a, bad, kmax: int, degree_two: bool):
    """Vectorized satake_power: rows k = 0..kmax, columns follow ``a``."""
    a = np.asarray(a)
    bad = np.asarray(bad, dtype=bool)
    out = np.empty((kmax + 1,) + a.shape, dtype=a.dtype if np.iscomplexobj(a) else np.float64)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = a
    for k in range(2, kmax + 1):
        out[k] = out[k - 1] * a
    if degree_two:
        good = ~bad
        s = np.empty_like(out)
        s[0] = 2.0
        if kmax >= 1:
            s[1] = a
        for k in range(2, kmax + 1):
            s[k] = a * s[k - 1] - s[k - 2]
        out[:, good] = s[:, good]
    return out


def local_coefficients(a, mmax: int, bad: bool = False, degree_two: bool = True):
    """a_F(p^m), m = 0..mmax, from the local Euler factor."""
    if bad or not degree_two:
        return [a**m for m in range(mmax + 1)]
    c = [1.0 + 0.0 * a, a]
    while len(c) <= mmax:
        c.append(a * c[-1] - c[-2])
    return c[: mmax + 1]


def local_inverse_coefficients(desc: LFunctionDescriptor, p: int, kmax: int, a=None, bad=None):
    """mu_F(p^k), k = 0..kmax: series coefficients of the inverse local factor."""
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    if a is None or bad is None:
        tab = prime_coefficients(desc, max(p, 2))
        a = tab.value(p) if a is None else a
        bad = tab.is_bad(p) if bad is None else bad
    out = [0.0 * a] * (kmax + 1)
    out[0] = 1.0 + 0.0 * a
    if kmax >= 1:
        out[1] = -a
    if kmax >= 2 and _good_degree_two(desc, bad):
        out[2] = 1.0 + 0.0 * a
    return out


# -- Lambda_F and psi_F --------------------------------------------------------


def lambda_table(desc: LFunctionDescriptor, N: int, coeffs: PrimeCoefficientTable | None = None, **kw) -> CoefficientTable:
    """Lambda_F(n) = satake_power(a_F(p), k) log p at n = p^k <= N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if desc.source.kind == "riemann_zeta" and coeffs is None:
        t = von_mangoldt_sieve(N)
        return CoefficientTable(desc.name, t.N, t.lambda_values, t.psi_prefix, desc.pole_order, {})
    if coeffs is None:
        coeffs = prime_coefficients(desc, max(N, 2), **kw)
    elif coeffs.P < N:
        raise ValueError(f"coefficient table stops at {coeffs.P} < {N}")
    primes = coeffs.primes[coeffs.primes <= N]
    n, p, k = prime_power_index(N, primes)
    idx = np.searchsorted(coeffs.primes, p)
    a = coeffs.values[idx]
    bad = coeffs.bad[idx]
    if np.iscomplexobj(a):
        raise ValueError("complex coefficients are not supported by the real-valued tables")
    kmax = int(k.max()) if k.size else 1
    two = abs(desc.degree - 2.0) < 1e-9
    if not two and abs(desc.degree - 1.0) > 1e-9:
        raise ValueError(f"local factors for degree {desc.degree} are not built in")
    sat = satake_power_table(a, bad, kmax, two)
    lam = np.zeros(N + 1)
    lam[n] = sat[k, np.arange(k.size)] * np.log(p.astype(np.float64))
    return CoefficientTable.from_lambda(desc.name, lam, desc.pole_order, P=coeffs.P)


def orthogonality_sum(desc: LFunctionDescriptor, x: float, coeffs: PrimeCoefficientTable | None = None) -> float:
    """S(x) = sum_{p <= x} |a_F(p)|^2 / p."""
    if x < 2:
        raise ValueError("x must be at least 2")
    P = int(math.floor(x))
    if coeffs is None:
        coeffs = prime_coefficients(desc, P)
    sel = coeffs.primes <= x
    return fsum(np.abs(coeffs.values[sel]) ** 2 / coeffs.primes[sel])
