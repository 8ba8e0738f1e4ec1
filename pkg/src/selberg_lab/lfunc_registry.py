"""L-function descriptors: functional-equation data and the invariants derived from it.

A descriptor records the completed function

    Phi(s) = Q^s * prod_j Gamma(lambda_j s + mu_j) * F(s)

together with the pole order at s = 1 and a tag describing where the Euler
coefficients come from.  Only the degree and conductor are consumed downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

EULER_GAMMA = 0.57721566490153286061
LOG_2PI = math.log(2.0 * math.pi)

BUILTIN_KINDS = ("riemann_zeta", "ramanujan_delta", "elliptic_curve", "external_table")


class DescriptorError(ValueError):
    """Raised for invalid descriptor parameters."""


@dataclass(frozen=True)
class GammaFactor:
    lam: float
    mu: complex = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise DescriptorError(f"gamma factor needs lambda > 0, got {self.lam}")
        if complex(self.mu).real < 0:
            raise DescriptorError(f"gamma factor needs Re(mu) >= 0, got {self.mu}")


@dataclass(frozen=True)
class CoefficientSource:
    """Where a_F(p) comes from.

    ``kind`` is one of riemann_zeta, ramanujan_delta, elliptic_curve or
    external_table.  Elliptic curves carry the Weierstrass coefficients
    (a1, a2, a3, a4, a6) and the conductor; external tables carry a path.
    """

    kind: str
    a_invariants: tuple[int, int, int, int, int] | None = None
    conductor: int | None = None
    path: str | None = None

    def cache_key(self) -> str:
        if self.kind == "elliptic_curve":
            inv = "_".join(str(a) for a in self.a_invariants)
            return f"ec_{inv}_N{self.conductor}"
        if self.kind == "external_table":
            return "ext_" + Path(self.path).stem
        return self.kind


@dataclass(frozen=True)
class LFunctionDescriptor:
    name: str
    q_scale: float
    gamma_factors: tuple[GammaFactor, ...]
    root_number: complex
    pole_order: int
    source: CoefficientSource
    # external tables state their invariants instead of gamma data
    degree_override: float | None = None
    conductor_override: float | None = None
    bad_primes: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if abs(abs(complex(self.root_number)) - 1.0) > 1e-12:
            raise DescriptorError(f"root number must have modulus 1, got {self.root_number}")
        if self.pole_order < 0:
            raise DescriptorError("pole order must be nonnegative")
        if not self.q_scale > 0:
            raise DescriptorError("Q must be positive")

    @property
    def degree(self) -> float:
        return degree(self)

    @property
    def conductor(self) -> float:
        return conductor(self)

    @property
    def log_conductor(self) -> float:
        return math.log(conductor(self))

    @property
    def is_degree_two(self) -> bool:
        return abs(degree(self) - 2.0) < 1e-9


def degree(desc: LFunctionDescriptor) -> float:
    """d_F = 2 * sum(lambda_j)."""
    if desc.degree_override is not None:
        return float(desc.degree_override)
    return 2.0 * math.fsum(g.lam for g in desc.gamma_factors)


def conductor(desc: LFunctionDescriptor) -> float:
    """q_F = (2 pi)^{d_F} Q^2 prod lambda_j^{2 lambda_j}."""
    if desc.conductor_override is not None:
        return float(desc.conductor_override)
    d = degree(desc)
    log_q = d * LOG_2PI + 2.0 * math.log(desc.q_scale)
    log_q += math.fsum(2.0 * g.lam * math.log(g.lam) for g in desc.gamma_factors)
    return math.exp(log_q)


def weierstrass_discriminant(a1: int, a2: int, a3: int, a4: int, a6: int) -> int:
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def _prime_factors(n: int) -> frozenset[int]:
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return frozenset(out)


def make_builtin(kind: str, **params) -> LFunctionDescriptor:
    """Build one of the hard-coded instances.

    ``kind='elliptic_curve'`` needs ``a_invariants=(a1, a2, a3, a4, a6)`` and
    ``conductor=N``; ``kind='external_table'`` needs ``path``, ``degree`` and
    ``conductor`` (optionally ``pole_order`` and ``bad_primes``).
    """
    name = params.get("name")
    if kind == "riemann_zeta":
        return LFunctionDescriptor(
            name=name or "zeta",
            q_scale=math.pi ** -0.5,
            gamma_factors=(GammaFactor(0.5, 0.0),),
            root_number=1.0,
            pole_order=1,
            source=CoefficientSource("riemann_zeta"),
        )
    if kind == "ramanujan_delta":
        return LFunctionDescriptor(
            name=name or "delta",
            q_scale=1.0 / (2.0 * math.pi),
            gamma_factors=(GammaFactor(1.0, 5.5),),
            root_number=1.0,
            pole_order=0,
            source=CoefficientSource("ramanujan_delta"),
        )
    if kind == "elliptic_curve":
        inv = params.get("a_invariants")
        N = params.get("conductor")
        if inv is None or len(inv) != 5:
            raise DescriptorError("elliptic_curve needs a_invariants=(a1, a2, a3, a4, a6)")
        if N is None:
            raise DescriptorError("elliptic_curve needs a conductor")
        inv = tuple(int(a) for a in inv)
        N = int(N)
        if N < 1:
            raise DescriptorError(f"conductor must be a positive integer, got {N}")
        disc = weierstrass_discriminant(*inv)
        if disc == 0:
            raise DescriptorError(f"curve {inv} is singular (discriminant 0)")
        bad = _prime_factors(N)
        stray = bad - _prime_factors(disc)
        if stray:
            raise DescriptorError(
                f"conductor {N} has primes {sorted(stray)} not dividing the discriminant {disc}"
            )
        root = params.get("root_number", 1.0)
        return LFunctionDescriptor(
            name=name or f"ec{N}",
            q_scale=math.sqrt(N) / (2.0 * math.pi),
            gamma_factors=(GammaFactor(1.0, 0.5),),
            root_number=root,
            pole_order=0,
            source=CoefficientSource("elliptic_curve", a_invariants=inv, conductor=N),
            bad_primes=bad,
        )
    if kind == "external_table":
        path = params.get("path")
        if path is None:
            raise DescriptorError("external_table needs a path")
        p = Path(path)
        if not p.is_file():
            raise DescriptorError(f"external table {path} is not readable")
        d = params.get("degree")
        q = params.get("conductor")
        if d is None or q is None:
            raise DescriptorError("external_table needs explicit degree and conductor")
        return LFunctionDescriptor(
            name=name or p.stem,
            q_scale=1.0,
            gamma_factors=(),
            root_number=params.get("root_number", 1.0),
            pole_order=int(params.get("pole_order", 0)),
            source=CoefficientSource("external_table", path=str(p)),
            degree_override=float(d),
            conductor_override=float(q),
            bad_primes=frozenset(int(b) for b in params.get("bad_primes", ())),
        )
    raise DescriptorError(f"unknown builtin kind {kind!r}; expected one of {BUILTIN_KINDS}")


CURVE_37A = dict(a_invariants=(0, 0, 1, -1, 0), conductor=37, root_number=-1.0)


def zeta() -> LFunctionDescriptor:
    return make_builtin("riemann_zeta")


def delta() -> LFunctionDescriptor:
    return make_builtin("ramanujan_delta")


def curve37a() -> LFunctionDescriptor:
    return make_builtin("elliptic_curve", name="ec37a", **CURVE_37A)
