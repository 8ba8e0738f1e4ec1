import math
import warnings

import numpy as np
import pytest

from selberg_lab import euler_products as ep
from selberg_lab.coefficients import primes_up_to
from selberg_lab.coefficients.tables import prime_coefficients
from selberg_lab.lfunc_registry import curve37a, delta, make_builtin, zeta
from selberg_lab.selftest import fxf_local_oracle

BUILTINS = {"zeta": zeta, "delta": delta, "ec37a": curve37a}


def test_policy_checks():
    with pytest.raises(ValueError):
        ep.TruncationPolicy(P=50)
    with pytest.raises(ValueError):
        ep.TruncationPolicy(L=3)
    with pytest.raises(ValueError):
        ep.TruncationPolicy(eps=0.0)


def test_tensor_zeta_at_two():
    v = ep.tensor_product_FxF(zeta(), 2.0)
    assert v.value.real == pytest.approx(math.pi**2 / 6, abs=max(2 * v.tail, 1e-9))
    assert v.value.real == pytest.approx(1.64493, abs=1e-5)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_tensor_far_right_is_one(name):
    d = BUILTINS[name]()
    v = ep.tensor_product_FxF(d, 30.0)
    # only p = 2, l = 1 survives at this precision: |a(2)|^2 2^{-30}
    lead = abs(prime_coefficients(d, 100).value(2)) ** 2 * 2.0**-30
    assert abs(v.value - (1.0 + lead)) <= 1e-12
    if lead < 1e-9:
        assert abs(v.value - 1.0) <= 1e-9


def test_tensor_delta_matches_local_oracle():
    policy = ep.TruncationPolicy(P=20_000)
    coeffs = prime_coefficients(delta(), policy.P)
    want = math.exp(math.fsum(math.log(fxf_local_oracle(a, 2.0)(float(p) ** -2.0)) for p, a in zip(coeffs.primes.tolist(), coeffs.values.tolist())))
    assert ep.tensor_product_FxF(delta(), 2.0, policy).value.real == pytest.approx(want, rel=1e-8)


def test_tensor_rejects_critical_strip():
    with pytest.raises(ValueError):
        ep.tensor_product_FxF(zeta(), 1.0)


def test_residue_zeta():
    assert float(ep.residue_FxF(zeta())) == pytest.approx(1.0, abs=0.02)


def test_residue_delta_stable():
    a = float(ep.residue_FxF(delta(), ep.TruncationPolicy(P=100_000)))
    b = float(ep.residue_FxF(delta(), ep.TruncationPolicy(P=200_000)))
    assert a > 0 and abs(a - b) / b <= 0.05


def test_residue_without_pole_flags(tmp_path):
    p = tmp_path / "zero.txt"
    p.write_text("\n".join(f"{q} 0.0" for q in primes_up_to(1000).tolist()) + "\n")
    # degree 1 with a(p) = 0 makes every b(p^l) vanish (degree 2 would keep s_2 = -2)
    d = make_builtin("external_table", path=str(p), degree=1, conductor=1)
    policy = ep.TruncationPolicy(P=1000)
    assert ep.tensor_product_FxF(d, 1.5, policy).value == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ep.ConvergenceError):
        ep.residue_FxF(d, policy)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_a_at_zero_and_flat(name):
    d = BUILTINS[name]()
    assert abs(ep.a_f(d, 0.0).value - 1.0) <= 1e-8
    h = 1e-3
    A = lambda r: ep.a_f(d, r).value
    deriv = (-A(2 * h) + 8 * A(h) - 8 * A(-h) + A(-2 * h)) / (12 * h)
    assert abs(deriv) <= 1e-6


@pytest.mark.parametrize("r", [0.0, 0.1, -0.1, 0.2, -0.2, 0.1j])
def test_zeta_specialization(r):
    assert abs(ep.a_f(zeta(), r).value - ep.zeta_A(r)) <= 1e-6
    assert abs(ep.b_f(zeta(), r).value - ep.zeta_B(r)) <= 1e-6


def test_zeta_A_at_zero():
    assert abs(ep.zeta_A(0.0) - 1.0) <= 1e-8


def test_zeta_B_truncation():
    z5 = ep.zeta_B(0.0, P=100_000).real + ep.b_tail(100_000)
    z6 = ep.zeta_B(0.0, P=1_000_000).real + ep.b_tail(1_000_000)
    assert abs(z5 - z6) <= 1e-6


def test_b_deep_right_decreasing():
    vals = [ep.b_f(delta(), r).value.real for r in (10.0, 11.0, 12.0)]
    assert vals[0] > vals[1] > vals[2] > 0
    # p = 2 carries essentially everything
    p2 = ep.b_f(delta(), 10.0, ep.TruncationPolicy(P=100)).value.real
    assert p2 == pytest.approx(vals[0], rel=1e-3)


def test_b_delta_stable():
    v1 = ep.b_f(delta(), 0.0, ep.TruncationPolicy(P=100_000))
    v2 = ep.b_f(delta(), 0.0, ep.TruncationPolicy(P=200_000))
    assert abs((v1.value.real + v1.tail) - (v2.value.real + v2.tail)) <= 1e-4


def test_a_conjugate_symmetry():
    v = ep.a_f(delta(), 0.2).value * ep.a_f(delta(), -0.2).value
    assert abs(v.imag) < 1e-12 and v.real > 0


def test_range_errors():
    with pytest.raises(ValueError):
        ep.a_f(zeta(), 0.25)
    with pytest.raises(ValueError):
        ep.b_f(zeta(), -0.5)
    with pytest.raises(ValueError):
        ep.zeta_A(0.3)
    with pytest.raises(ValueError):
        ep.rcs_integrand(zeta(), 0.0, 10.0)


def test_g_large_eta_finite():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = ep.rcs_integrand(zeta(), 5.0, 100.0).value
    first = abs(ep._zeta_log_second(complex(1.0, 5.0))) + abs(ep.b_f(zeta(), 5j).value)
    assert np.isfinite(g) and abs(g) <= 10 * first


@pytest.mark.parametrize("name,t", [("zeta", 0.0), ("zeta", 50.0), ("delta", 10.0)])
def test_g_small_eta_pole(name, t):
    d = BUILTINS[name]()
    eta = 1e-3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = ep.rcs_integrand(d, eta, t).value
    want = -1j * ep.log_conductor_height(d, t)
    assert abs(eta * g - want) <= 0.01 * abs(want)


def test_log_factor_at_t_zero():
    assert ep.log_conductor_height(zeta(), 0.0) == pytest.approx(math.log(1 / math.pi), abs=1e-14)


def test_g_eta_squared_vanishes():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        scaled = [abs(ep.rcs_integrand(zeta(), 2.0**-j, 10.0).value) * 2.0**-j for j in range(4, 11)]
    # eta g stays bounded, so eta^2 g -> 0
    assert max(scaled) <= 2 * scaled[-1]
    assert scaled[-1] * 2.0**-10 < 1e-2


def test_principal_value_is_bounded():
    g = ep.rcs_integrand(zeta(), 0.0, 10.0, principal_value=True)
    assert g.regularized and np.isfinite(g.value) and abs(g.value) < 100


def test_form_factor_branches():
    T = 1000.0
    assert ep.form_factor_prediction(zeta(), math.sqrt(T), T) == pytest.approx(T * math.log(T) / (2 * math.pi), rel=1e-14)
    ec = curve37a()
    assert ep.form_factor_prediction(ec, T**3, T) == pytest.approx(
        (T / math.pi) * (2 * math.log(T / (2 * math.pi)) + math.log(37) - 2), rel=1e-12
    )
    assert ep.form_factor_prediction(delta(), 1.0, T) == 0.0
    # tie goes to the second branch
    assert ep.form_factor_prediction(zeta(), T, T) == pytest.approx((T / math.pi) * (math.log(T / (2 * math.pi)) - 1), rel=1e-12)
    with pytest.raises(ValueError):
        ep.form_factor_prediction(zeta(), 10.0, 6.0)
