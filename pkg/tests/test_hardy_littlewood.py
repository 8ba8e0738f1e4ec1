import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selberg_lab.coefficients import lambda_table, primes_up_to, von_mangoldt_sieve
from selberg_lab.hardy_littlewood import autocorrelation, singular_series
from selberg_lab.lfunc_registry import delta


def test_odd_k_is_zero():
    for k in (1, 3, 15, 999):
        s = singular_series(k)
        assert s.value == 0.0


def test_twin_constant():
    s = singular_series(2, P=10**6)
    assert s.value == pytest.approx(1.32032, abs=1e-5)
    assert s.cutoff == 10**6 and 0 < s.tail_bound <= 1e-5
    p = primes_up_to(10**6)[1:].astype(float)
    assert s.value == pytest.approx(2 * math.prod((1 - 1 / (p - 1) ** 2).tolist()), rel=1e-12)


def test_six_is_twice_two():
    assert singular_series(6).value / singular_series(2).value == pytest.approx(2.0, abs=1e-12)


def _odd_prime_factors(k):
    return [p for p in primes_up_to(k).tolist() if p > 2 and k % p == 0]


@settings(max_examples=50, deadline=None)
@given(k=st.integers(1, 5000).map(lambda j: 2 * j))
def test_ratio_identity(k):
    want = math.prod((p - 1) / (p - 2) for p in _odd_prime_factors(k))
    assert singular_series(k).value / singular_series(2).value == pytest.approx(want, rel=1e-12)


def test_mean_value_near_one():
    vals = [singular_series(k, P=10**5).value for k in range(1, 10**4 + 1)]
    assert abs(np.mean(vals) - 1.0) <= 0.02


def test_input_checks():
    with pytest.raises(ValueError):
        singular_series(0)
    with pytest.raises(ValueError):
        singular_series(2, P=2)


def test_autocorrelation_small_example():
    t = von_mangoldt_sieve(30)
    want = sum(math.log(a) * math.log(b) for a, b in ((2, 2), (3, 5), (5, 7), (7, 3), (3, 11), (11, 13), (17, 19)))
    assert autocorrelation(t, 20, 2) == pytest.approx(want, abs=1e-12)
    assert autocorrelation(t, 20, 2) == pytest.approx(24.645, abs=1e-3)


def test_autocorrelation_k0_sum_of_squares():
    t = lambda_table(delta(), 1000)
    assert autocorrelation(t, 900, 0) == pytest.approx(float(np.sum(t.lambda_values[1:901] ** 2)))
    assert autocorrelation(t, 900, 0) >= 0


def test_autocorrelation_range():
    with pytest.raises(ValueError):
        autocorrelation(von_mangoldt_sieve(100), 99, 2)


def test_zeta_twin_asymptotic():
    X = 10**6
    r = autocorrelation(von_mangoldt_sieve(X + 2), X, 2) / (singular_series(2).value * X)
    assert 0.9 <= r <= 1.1


def test_delta_no_correlation():
    X = 10**6
    assert abs(autocorrelation(lambda_table(delta(), X + 2), X, 2)) <= 0.05 * X
