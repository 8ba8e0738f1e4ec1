"""Independent-oracle checks: each compares a library routine against a value
computed by a separate route (direct sums, generic quadrature, brute-force
double loops, closed forms).  ``run`` returns True iff every check passes."""

from __future__ import annotations

import math
import tempfile
import time
from pathlib import Path

import numpy as np
from scipy import integrate

from . import euler_products as ep
from . import hardy_littlewood as hl
from . import tauberian as tb
from . import variance as var
from . import zero_stats as zs
from .coefficients import elliptic, sieve, tables, tau
from .lfunc_registry import CURVE_37A, curve37a, delta, zeta


def _close(x, y, tol, rel=False):
    err = abs(x - y) / (abs(y) if rel else 1.0)
    return err <= tol, f"got {x:.12g}, want {y:.12g}, {'rel' if rel else 'abs'} err {err:.2e} (tol {tol:.0e})"


def naive_prime_powers(N):
    """(n, p) for prime powers n <= N by trial division."""
    out = []
    for n in range(2, N + 1):
        p = next(d for d in range(2, n + 1) if n % d == 0)
        m = n
        while m % p == 0:
            m //= p
        if m == 1:
            out.append((n, p))
    return out


def quad_variance(table, X, param, kind):
    """The variance integral by scipy.quad between the jumps of the integrand."""
    m = table.pole_order
    if kind == "tilde":
        h = param
        f = lambda x: (float(table.psi(x + h) - table.psi(x)) - m * h) ** 2
        jumps = [n for n in range(1, int(X + h) + 2)] + [n - h for n in range(1, int(X + h) + 2)]
    else:
        d = param
        f = lambda x: (float(table.psi(x * (1 + d)) - table.psi(x)) - m * d * x) ** 2
        jumps = [n for n in range(1, int(X * (1 + d)) + 2)] + [n / (1 + d) for n in range(1, int(X * (1 + d)) + 2)]
    pts = sorted({1.0, float(X), *(j for j in jumps if 1.0 < j < X)})
    return math.fsum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-13)[0] for a, b in zip(pts, pts[1:]))


def naive_pair_sum(g, X, T, weight):
    g = g[np.abs(g) <= T]
    u = g[:, None] - g[None, :]
    return math.fsum((np.cos(u * math.log(X)) * weight(u)).ravel())


def fxf_local_oracle(a, s):
    """Local factor of F x conj(F) at a good degree-2 prime with alpha + beta = a,
    alpha beta = 1: 1 / ((1 - x)^2 (1 - (a^2 - 2) x + x^2)), x = p^{-s}."""
    return lambda x: 1.0 / ((1.0 - x) ** 2 * (1.0 - (a * a - 2.0) * x + x * x))


# -- checks ------------------------------------------------------------------------


def check_conductors():
    oks = [_close(d.conductor, want, 1e-12)[0] for d, want in ((zeta(), 1.0), (delta(), 1.0), (curve37a(), 37.0))]
    return all(oks), f"conductors {zeta().conductor:.15g}, {delta().conductor:.15g}, {curve37a().conductor:.15g}"


def check_psi10():
    want = math.fsum(math.log(p) for n, p in naive_prime_powers(10))
    return _close(float(sieve.von_mangoldt_sieve(10).psi(10)), want, 1e-12)


def check_sieve_small():
    N = 3000
    want = np.zeros(N + 1)
    for n, p in naive_prime_powers(N):
        want[n] = math.log(p)
    got = sieve.von_mangoldt_sieve(N).lambda_values
    err = float(np.max(np.abs(got - want)))
    return err < 1e-12, f"max |Lambda - naive| over n <= {N}: {err:.1e}"


def check_tau2():
    # q prod (1 - q^n)^24 to order q^2: (1 - q)^24 contributes -24 q
    t2 = tau.TauExpansion(10).tau(2)
    ok1, d1 = _close(float(t2), -24.0, 0.0)
    a2 = tables.prime_coefficients(delta(), 50).value(2)
    ok2, d2 = _close(a2, -24.0 / 2**5.5, 1e-15)
    return ok1 and ok2, d1 + "; " + d2


def check_ec_a2():
    count = 1  # point at infinity
    for x in range(2):
        for y in range(2):
            count += (y * y + y - x**3 + x) % 2 == 0
    ok1, d1 = _close(float(elliptic.trace_two(CURVE_37A["a_invariants"])), 2 + 1 - count, 0.0)
    ok2, d2 = _close(tables.prime_coefficients(curve37a(), 50).value(2), -math.sqrt(2.0), 1e-15)
    return ok1 and ok2, d1 + "; " + d2


def check_ec_counts():
    inv = CURVE_37A["a_invariants"]
    ps = np.array([3, 5, 7, 11, 13, 101, 103, 997])
    want = []
    for p in ps.tolist():
        pts = 1 + sum((y * y + y - x**3 + x) % p == 0 for x in range(p) for y in range(p))
        want.append(p + 1 - pts)
    got = elliptic.traces(inv, ps).tolist()
    return got == want, f"a_p {got} vs brute force {want}"


def check_satake():
    a = 0.7
    # -(d/ds) log(1 - a x + x^2) with x = p^{-s}: coefficient of x^2 is a^2 - 2
    x = 1e-3
    series = -math.log(1 - a * x + x * x)  # sum_k s_k x^k / k
    s1, s2 = a, tables.satake_power(a, 2)
    ok, det = _close(s2, a * a - 2.0, 1e-15)
    resid = series - (s1 * x + s2 * x * x / 2)
    return ok and abs(resid) < 1e-8, det + f"; series residual {resid:.1e}"


def check_delta_lambda4():
    d = delta()
    t = tables.lambda_table(d, 10)
    a = tables.prime_coefficients(d, 10).value(2)
    return _close(t.lambda_values[4], (a * a - 2.0) * math.log(2.0), 1e-14)


def check_local_inverse():
    a = 0.37
    # series of 1 / (1 - a x + x^2) inverted term by term
    num = np.zeros(6)
    den = np.array([1.0, -a, 1.0, 0, 0, 0])
    inv = np.zeros(6)
    inv[0] = 1.0
    for n in range(1, 6):
        inv[n] = -sum(den[j] * inv[n - j] for j in range(1, n + 1))
    mu = tables.local_inverse_coefficients(curve37a(), 2, 5, a=a, bad=False)
    # mu holds the Dirichlet coefficients of 1/F locally, i.e. of (1 - a x + x^2)
    prod = np.convolve(mu[:6], inv)[:6]
    num[0] = 1.0
    err = float(np.max(np.abs(prod - num)))
    ok = err < 1e-15 and np.allclose(mu[:4], [1.0, -a, 1.0, 0.0])
    return ok, f"mu {np.round(mu[:4], 6).tolist()}, |mu * F - 1| = {err:.1e}"


def check_orthogonality():
    d = zeta()
    want = math.fsum(1.0 / p for n, p in naive_prime_powers(100) if n == p)
    ok1, d1 = _close(tables.orthogonality_sum(d, 100), want, 1e-13)
    s = tables.orthogonality_sum(delta(), 1e5)
    ok2 = abs(s - math.log(math.log(1e5))) <= 1.5
    return ok1 and ok2, d1 + f"; delta S(1e5) = {s:.4f}"


def check_variance_oracles():
    t = sieve.von_mangoldt_sieve(2000)
    msgs, oks = [], []
    for kind, X, p in (("tilde", 10.0, 1.0), ("tilde", 50.0, 2.5), ("delta", 1000.0, 0.1), ("delta", 37.5, 0.3)):
        fn = var.v_tilde if kind == "tilde" else var.v_delta
        ok, det = _close(fn(t, X, p).value, quad_variance(t, X, p, kind), 1e-9, rel=True)
        oks.append(ok)
        msgs.append(f"{kind}({X:g}, {p:g}) {det}")
    return all(oks), "; ".join(msgs)


def check_variance_consistency():
    X = 1e5
    t = sieve.von_mangoldt_sieve(int(2 * X) + 2)
    h = X**0.6
    r = var.v_delta(t, X, h / X).value / var.v_tilde(t, X, h).value
    return 0.2 <= r <= 5.0, f"V(X, h/X) / V~(X, h) = {r:.3f}"


def check_variance_curve():
    X = 1.5e6
    t = sieve.von_mangoldt_sieve(int(2 * X) + 2)
    c = var.variance_curve(t, X, var.log_spaced_h(X, 3.0, 10.0, 30))
    xs = [r.param for r in c.points]
    return len(c) == 30 and all(b > a for a, b in zip(xs, xs[1:])), f"{len(c)} points"


def check_singular_series():
    p = sieve.primes_up_to(1_000_000)
    prod = 2.0
    for q in p[1:].tolist():
        prod *= 1.0 - 1.0 / (q - 1.0) ** 2
    ok1, d1 = _close(hl.singular_series(2).value, prod, 1e-12, rel=True)
    ok2, d2 = _close(hl.singular_series(6).value / hl.singular_series(2).value, 2.0, 1e-12)
    return ok1 and ok2, d1 + "; ratio " + d2


def check_autocorrelation_small():
    lam = {n: math.log(p) for n, p in naive_prime_powers(30)}
    want = math.fsum(lam[n] * lam[n + 2] for n in range(1, 21) if n in lam and n + 2 in lam)
    got = hl.autocorrelation(sieve.von_mangoldt_sieve(30), 20, 2)
    return _close(got, want, 1e-12)


def check_tensor_zeta():
    v = ep.tensor_product_FxF(zeta(), 2.0)
    return _close(v.value.real, math.pi**2 / 6, max(2.0 * v.tail, 1e-9))


def check_tensor_delta():
    policy = ep.TruncationPolicy(P=20_000)
    d = delta()
    coeffs = tables.prime_coefficients(d, policy.P)
    s = 2.0
    logs = []
    for p, a in zip(coeffs.primes.tolist(), coeffs.values.tolist()):
        logs.append(math.log(fxf_local_oracle(a, s)(float(p) ** -s)))
    want = math.exp(math.fsum(logs))
    got = ep.tensor_product_FxF(d, s, policy).value.real
    return _close(got, want, 1e-8, rel=True)


def check_residues():
    r = ep.residue_FxF(zeta())
    ok1, d1 = _close(float(r), 1.0, 0.02)
    a = float(ep.residue_FxF(delta(), ep.TruncationPolicy(P=100_000)))
    b = float(ep.residue_FxF(delta(), ep.TruncationPolicy(P=200_000)))
    ok2 = a > 0 and abs(a - b) / b <= 0.05
    return ok1 and ok2, d1 + f"; delta {a:.6f} (P) vs {b:.6f} (2P)"


def check_a_b_specialize():
    msgs, oks = [], []
    for r in (0.1, -0.1, 0.2j):
        ok, det = _close(ep.a_f(zeta(), r).value, ep.zeta_A(r), 1e-6)
        oks.append(ok)
        msgs.append(f"A({r}) {det}")
    ok, det = _close(ep.b_f(zeta(), 0.0).value, ep.zeta_B(0.0), 1e-6)
    oks.append(ok)
    msgs.append(f"B(0) {det}")
    return all(oks), "; ".join(msgs)


def check_b_stability():
    v1 = ep.b_f(delta(), 0.0, ep.TruncationPolicy(P=100_000))
    v2 = ep.b_f(delta(), 0.0, ep.TruncationPolicy(P=200_000))
    b1, b2 = v1.value.real + v1.tail, v2.value.real + v2.tail
    ok1 = abs(b1 - b2) <= 1e-4
    z5 = ep.zeta_B(0.0, P=100_000).real + ep.b_tail(100_000)
    z6 = ep.zeta_B(0.0, P=1_000_000).real + ep.b_tail(1_000_000)
    ok2 = abs(z5 - z6) <= 1e-6
    return ok1 and ok2, f"delta B(0) tail-corrected: {b1:.8f} vs {b2:.8f}; zeta B(0) tail-corrected {z5:.9f} vs {z6:.9f}"


def check_a_conjugate():
    v = ep.a_f(delta(), 0.2).value * ep.a_f(delta(), -0.2).value
    return abs(v.imag) < 1e-12 and v.real > 0, f"A(0.2) A(-0.2) = {v:.10g}"


def check_g_large_eta():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = ep.rcs_integrand(zeta(), 5.0, 100.0).value
    sp = complex(1.0, 5.0)
    first = abs(ep._zeta_log_second(sp)) + abs(ep.b_f(zeta(), 5j).value)
    return bool(np.isfinite(g)) and abs(g) <= 10 * first, f"|g(5, 100)| = {abs(g):.4g}, bracket scale {first:.4g}"


def check_zero_parse():
    with tempfile.TemporaryDirectory() as tmp:
        p = Path(tmp) / "z.txt"
        p.write_text("14.134725\n21.022040\n25.010858\n")
        z = zs.load_zeros(p)
    return len(z) == 3 and z.signed().size == 6, f"{len(z)} ordinates, {z.signed().size} signed"


def check_single_zero():
    g = 14.134725
    z = zs.ZeroList(np.array([g]))
    X, T = 7.0, 20.0
    want = 2 + 2 * math.cos(2 * g * math.log(X)) * 4 / (4 + 4 * g * g)
    ok1, d1 = _close(zs.f_statistic(z, X, T), want, 1e-12)
    # the same zero, unreflected: int_{-T}^{T} (1 + (t - g)^2)^{-2} dt
    z1 = zs.ZeroList(np.array([g]), reflect=False)
    q = integrate.quad(lambda t: (1 + (t - g) ** 2) ** -2, -T, T, epsabs=0, epsrel=1e-12, points=[g])[0]
    ok2, d2 = _close(zs.i_integral(z1, X, T, T), q, 1e-6, rel=True)
    return ok1 and ok2, d1 + "; I " + d2


def check_pair_sums():
    rng = np.random.default_rng(7)
    oks, worst = [], 0.0
    for z in (zs.synth_zeros("picket", 400, spacing=0.37), zs.ZeroList(np.sort(rng.uniform(0, 300, 500)))):
        g = z.signed()
        T = 0.8 * z.max_ordinate
        for X in (1.0, 3.7, 250.0):
            a = zs.f_statistic(z, X, T, band=None)
            b = naive_pair_sum(g, X, T, lambda u: 4 / (4 + u * u))
            c = zs.f_tilde(z, X, T, band=40.0)
            d = naive_pair_sum(g, X, T, lambda u: np.exp(-u * u))
            worst = max(worst, abs(a - b) / abs(b), abs(c - d) / abs(d))
    return worst <= 1e-12, f"max relative |fast - naive| = {worst:.1e}"


def check_f_tilde_positive():
    lo = min(zs.f_tilde(zs.ZeroList(np.sort(np.random.default_rng(s).uniform(0, 50, 60))), 10.0, 50.0) for s in range(50))
    return lo >= -1e-9, f"min f_tilde over 50 random lists = {lo:.3g}"


def check_fejer_cos():
    kappa = 0.1
    msgs, oks = [], []
    for a in (0.5 * kappa, 1.5 * kappa, 3.0 * kappa):
        got = tb.fejer_functional(lambda u, a=a: np.cos(a * u), kappa)
        ok, det = _close(got, math.pi * max(kappa - a / 2, 0.0), 1e-8)
        oks.append(ok)
        msgs.append(f"a={a:g}: {det}")
    return all(oks), "; ".join(msgs)


def check_k_eta():
    oks = [_close(float(tb.k_eta(0.0, e)), 2 + e, 1e-14)[0] for e in (0.1, 0.5, 1.0)]
    return all(oks), "k_eta(0) = 2 + eta"


def check_lemma2():
    e = 0.5
    d1 = tb.lemma2_transform_identity(e, 0.5)
    d2 = tb.lemma2_transform_identity(e, 1 + e / 2)
    return abs(d1) <= 1e-4 and abs(d2) <= 1e-4, f"differences {d1:.1e}, {d2:.1e}"


def check_lemma3():
    Y = 20.0
    r = tb.lemma3_check(lambda t: 1.0 + np.exp(-t), Y)
    want_conc = 1.5 + math.exp(-Y)  # int_0^{log 2} e^{2y} dy + e^{-Y} int_0^{log 2} e^{y} dy
    ok1, d1 = _close(r.conclusion, want_conc, 1e-12)
    ok2 = r.hypothesis_deviation <= 2 * math.exp(-Y + 1)
    return ok1 and ok2, d1 + f"; hypothesis deviation {r.hypothesis_deviation:.2e}"


def check_explicit_formula(zeros_path):
    if zeros_path is None:
        return None, "skipped: no zero list"
    z = zs.load_zeros(zeros_path)
    t = sieve.von_mangoldt_sieve(2000)
    r = zs.explicit_formula_residual(zeta(), t, z, 1000.5, 0.05, z.max_ordinate)
    return abs(r.residual) <= 20 * r.envelope, f"|residual| {abs(r.residual):.3g} vs 20 x envelope {20 * r.envelope:.3g}"


CHECKS = [
    check_conductors,
    check_psi10,
    check_sieve_small,
    check_tau2,
    check_ec_a2,
    check_ec_counts,
    check_satake,
    check_delta_lambda4,
    check_local_inverse,
    check_orthogonality,
    check_variance_oracles,
    check_variance_consistency,
    check_variance_curve,
    check_singular_series,
    check_autocorrelation_small,
    check_tensor_zeta,
    check_tensor_delta,
    check_residues,
    check_a_b_specialize,
    check_b_stability,
    check_a_conjugate,
    check_g_large_eta,
    check_zero_parse,
    check_single_zero,
    check_pair_sums,
    check_f_tilde_positive,
    check_fejer_cos,
    check_k_eta,
    check_lemma2,
    check_lemma3,
]


def run(zeros_path=None, log=print) -> list[tuple[str, bool | None, str, float]]:
    results = []
    for fn in CHECKS + [lambda: check_explicit_formula(zeros_path)]:
        name = getattr(fn, "__name__", "check_explicit_formula")
        name = "check_explicit_formula" if name == "<lambda>" else name
        start = time.time()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        dt = time.time() - start
        tag = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        log(f"{tag} {name[6:]} ({dt:.1f}s): {detail}")
        results.append((name[6:], ok, detail, dt))
    return results
