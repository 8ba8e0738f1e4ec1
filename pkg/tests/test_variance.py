import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selberg_lab.coefficients import lambda_table, von_mangoldt_sieve
from selberg_lab.coefficients.tables import CoefficientTable
from selberg_lab.lfunc_registry import EULER_GAMMA, LOG_2PI, curve37a, delta, zeta
from selberg_lab.selftest import quad_variance
from selberg_lab.variance import VarianceCurve, fit_line, log_spaced_h, v_delta, v_tilde, variance_curve

SMALL = {"zeta": von_mangoldt_sieve(2100), "delta": lambda_table(delta(), 2100), "ec37a": lambda_table(curve37a(), 2100)}


def test_zero_table_gives_zero():
    t = CoefficientTable.from_lambda("zero", np.zeros(200), pole_order=0)
    assert v_tilde(t, 50.0, 7.5).value == 0.0
    assert v_delta(t, 50.0, 0.5).value == 0.0


def test_v_tilde_oracle_example():
    t = SMALL["zeta"]
    assert v_tilde(t, 10.0, 1.0).value == pytest.approx(quad_variance(t, 10.0, 1.0, "tilde"), rel=1e-9)


def test_v_delta_oracle_example():
    t = SMALL["zeta"]
    assert v_delta(t, 1000.0, 0.1).value == pytest.approx(quad_variance(t, 1000.0, 0.1, "delta"), rel=1e-9)


@pytest.mark.parametrize("name", sorted(SMALL))
def test_exact_matches_quadrature_random(name):
    t = SMALL[name]
    rng = np.random.default_rng(hash(name) % 2**32)
    for _ in range(20):
        X = float(rng.uniform(5.0, 1000.0))
        h = float(rng.uniform(1.0, X))
        d = float(rng.uniform(0.01, 1.0))
        assert v_tilde(t, X, h).value == pytest.approx(quad_variance(t, X, h, "tilde"), rel=1e-9, abs=1e-12)
        assert v_delta(t, X, d).value == pytest.approx(quad_variance(t, X, d, "delta"), rel=1e-9, abs=1e-12)


def test_consistency_between_forms():
    X = 1e5
    t = von_mangoldt_sieve(int(2 * X) + 2)
    h = X**0.6
    r = v_delta(t, X, h / X).value / v_tilde(t, X, h).value
    assert 0.2 <= r <= 5.0


def test_zeta_normalized_value_at_h_X_over_e5():
    X = 1.5e6
    t = von_mangoldt_sieve(int(X * 1.01) + 2)
    r = v_tilde(t, X, X / math.e**5)
    want = 5 - EULER_GAMMA - LOG_2PI
    assert want == pytest.approx(2.585, abs=1e-3)
    assert abs(r.normalized - want) <= 0.15 * want


def test_range_errors():
    t = SMALL["zeta"]
    with pytest.raises(ValueError, match="table"):
        v_tilde(t, 2000.0, 500.0)
    with pytest.raises(ValueError):
        v_tilde(t, 10.0, 20.0)
    with pytest.raises(ValueError):
        v_delta(t, 10.0, 0.0)
    with pytest.raises(ValueError, match="table"):
        v_delta(t, 2000.0, 0.5)


def test_empty_curve():
    c = variance_curve(SMALL["zeta"], 100.0, [])
    assert len(c) == 0


def test_curve_30_points_monotone():
    X = 1.5e6
    t = von_mangoldt_sieve(int(X * (1 + math.exp(-3))) + 2)
    c = variance_curve(t, X, log_spaced_h(X, 3.0, 10.0, 30))
    xs = [r.param for r in c.points]
    assert len(c) == 30 and all(b > a for a, b in zip(xs, xs[1:]))
    assert c.meta["N"] == t.N


def test_curve_rejects_unsorted():
    t = SMALL["zeta"]
    with pytest.raises(ValueError, match="increasing"):
        variance_curve(t, 100.0, [5.0, 3.0])


def test_curve_csv(tmp_path):
    c = variance_curve(SMALL["zeta"], 100.0, [2.0, 4.0])
    c.to_csv(tmp_path / "v.csv")
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "X,h_or_delta,value,normalized,log_X_over_h"
    assert len(lines) == 3
    assert all(len(f.split("e")[0].replace("-", "").replace(".", "")) == 17 for f in lines[1].split(","))


def test_delta_curve_straddles_boundary():
    X = 1e6
    t = lambda_table(delta(), int(X * 1.05) + 2)
    grid = log_spaced_h(X, 3.5, 10.5, 15)
    assert grid.min() < X**0.5 < grid.max()
    c = variance_curve(t, X, grid)
    x, y = c.arrays()
    # flat where h is small, falling with h where h is large
    assert np.ptp(y[x > 9]) < 1.0
    assert y[x < 5].mean() < y[x > 9].mean() - 3.0


def test_fit_line():
    x = np.linspace(0, 1, 11)
    s, i = fit_line(x, 3 * x - 2)
    assert s == pytest.approx(3) and i == pytest.approx(-2)
    s, _ = fit_line(x, np.where(x > 0.5, 1.0, x), window=(0.6, 1.0))
    assert s == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        fit_line(x[:1], x[:1])


@settings(max_examples=40, deadline=None)
@given(X=st.floats(2.0, 2000.0), frac=st.floats(0.0, 1.0), d=st.floats(1e-3, 1.0))
def test_nonnegative_and_lemma4_band(X, frac, d):
    t = von_mangoldt_sieve(4100)
    h = 1.0 + frac * (X - 1.0)
    vt = v_tilde(t, X, h).value
    vd = v_delta(t, X, d).value
    assert vt >= 0 and vd >= 0
    assert vt <= 50 * h * X * math.log(2 * X / h) ** 2
    assert vd <= 50 * d * X * X * math.log(2 / d) ** 2
