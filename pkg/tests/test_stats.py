import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lbblab.oracle import integrated_target_rv
from lbblab.process import Path, smile_ma_spec, simulate, sigma_smile
from lbblab.rng import derive_seed
from lbblab.stats import (
    FunctionalFamily,
    WeightScheme,
    global_root_weights,
    kernel_weights,
    local_ecf,
    realized_volatility,
    true_cf_tvar1,
    unit_weights,
    weighted_statistic,
)

# independent values (mpmath, 30 digits)
B_2000 = 0.0478176249895  # 2000**-0.4
D_T_2000 = 191  # #{t : |t/2000 - 0.4| < b_T}
CF_04_6 = 2.14810298867764e-4
INT_SIGMA2 = 0.0050133333333333333
RIEMANN_1000 = 0.00501334613332992


def sin_a(u):
    return 0.9 * np.sin(2 * np.pi * np.asarray(u, dtype=float))


def test_kernel_weight_count():
    b = 2000**-0.4
    assert b == pytest.approx(B_2000, rel=1e-11)
    w = kernel_weights(0.4, b, 2000)
    assert w.d_T == D_T_2000
    assert w.C_w <= 10


def test_kernel_mode():
    T, b = 1000, 0.1
    w = kernel_weights(0.5, b, T)
    assert w.weights[499] == pytest.approx(0.75 / math.sqrt(b * T))
    assert w.weights.max() == w.weights[499]


def test_uniform_kernel_flat():
    T = 100
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        w = kernel_weights(0.5, 0.5, T, "uniform")
    np.testing.assert_allclose(w.weights, 0.5 / math.sqrt(0.5 * T))
    assert w.d_T == T


def test_kernel_errors():
    with pytest.raises(ValueError):
        kernel_weights(0.4, 1.5, 100)
    with pytest.raises(ValueError):
        kernel_weights(0.4, 0.1, 100, "gauss")
    with pytest.warns(UserWarning):
        kernel_weights(0.05, 0.1, 100)


def test_weight_scheme_validation():
    with pytest.raises(ValueError):
        WeightScheme(np.array([1.0, -0.1]))
    with pytest.warns(UserWarning):
        WeightScheme(np.r_[100.0, np.ones(3)])
    w = global_root_weights(400)
    assert w.d_T == 400 and w.C_w == pytest.approx(1.0)


def test_families():
    x = np.array([0.0, 1.0, -2.0])
    np.testing.assert_allclose(FunctionalFamily("cos", 2.0)(x), np.cos(2 * x))
    np.testing.assert_allclose(FunctionalFamily("sin", 2.0)(x), np.sin(2 * x))
    np.testing.assert_allclose(FunctionalFamily("square")(x), x * x)
    np.testing.assert_allclose(
        FunctionalFamily("ecf_modulus_diff", 2.0)(x), np.abs(np.exp(2j * x) - 1), atol=1e-15
    )
    xs = np.array([[1.0, 2.0], [0.5, -1.0]])
    np.testing.assert_allclose(FunctionalFamily("cos", (1.0, 0.5))(xs), np.cos([2.0, 0.0]))
    with pytest.raises(ValueError):
        FunctionalFamily("cube")
    with pytest.raises(ValueError):
        FunctionalFamily("cos", (1.0, 2.0))(x)
    assert FunctionalFamily("cos").bounded and not FunctionalFamily("square").bounded


def test_weighted_statistic_simple_cases():
    p = Path(np.array([1.0, -3.0, 2.0]))
    w = WeightScheme(np.array([0.0, 1.0, 0.0]))
    assert weighted_statistic(p, w, FunctionalFamily("square")) == 9.0
    w2 = WeightScheme(np.array([0.2, 0.3, 0.5]))
    assert weighted_statistic(p, w2, FunctionalFamily("cos", 0.0)) == pytest.approx(1.0)


def test_global_root_square_is_scaled_rv(smile_ma):
    p = simulate(smile_ma, 500, 1)
    assert weighted_statistic(p, global_root_weights(500), FunctionalFamily("square")) == \
        pytest.approx(realized_volatility(p) / math.sqrt(500))


def test_rv_simple():
    assert realized_volatility(Path(np.zeros(5))) == 0.0
    assert realized_volatility(Path(np.ones(10))) == 10.0
    p = Path(np.array([0.5, -1.5, 2.0]))
    assert realized_volatility(p) == weighted_statistic(p, unit_weights(3), FunctionalFamily("square"))


def test_local_ecf_constant_and_zero():
    T, b, u = 400, 0.1, 0.5
    w = kernel_weights(u, b, T)
    mass = w.weights.sum() / math.sqrt(b * T)
    c = 0.7
    assert local_ecf(Path(np.full(T, c)), w, 3.0) == pytest.approx(np.exp(3j * c) * mass)
    v = local_ecf(Path(np.random.default_rng(0).normal(size=T)), w, 0.0)
    assert v.imag == 0 and v.real == pytest.approx(mass)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(-10, 10))
def test_local_ecf_triangle_bound(seed, s):
    T = 200
    w = kernel_weights(0.4, 0.15, T)
    x = np.random.default_rng(seed).standard_cauchy(T)
    bound = w.weights.sum() / math.sqrt(0.15 * T)
    assert abs(local_ecf(Path(x), w, s)) <= bound * (1 + 1e-12)


def test_local_ecf_stable_ar(sin_ar):
    # |error| is dominated by noise of variance sum_t w_t**2 / (b_T T) ~ 0.0036,
    # so E|error| ~ 0.053; check unbiasedness and the noise level instead
    T = 5000
    b = T**-0.4
    w = kernel_weights(0.4, b, T)
    err = np.array([local_ecf(simulate(sin_ar, T, derive_seed(77, r)), w, 6.0) for r in range(200)]) - CF_04_6
    noise = np.sum(w.weights**2) / (b * T)
    mse = np.mean(np.abs(err) ** 2)
    assert abs(err.mean()) < 3 * math.sqrt(mse / err.size)
    assert 0.8 < mse / noise < 1.25
    assert np.mean(np.abs(err)) < 0.065


def test_true_cf_closed_form():
    assert true_cf_tvar1(0.4, 6.0, sin_a, 0.5, 1.5) == pytest.approx(CF_04_6, rel=1e-10)
    assert true_cf_tvar1(0.4, 0.0, sin_a, 0.5, 1.5) == 1.0
    zero = lambda u: np.zeros_like(np.asarray(u, dtype=float))  # noqa: E731
    assert true_cf_tvar1(0.3, 2.0, zero, 0.5, 1.5) == pytest.approx(math.exp(-(0.5**1.5) * 2**1.5))


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(-50, 50), st.floats(0.1, 3), st.floats(0.2, 2))
def test_true_cf_range_and_even(u, s, gamma, alpha):
    v = true_cf_tvar1(u, s, sin_a, gamma, alpha)
    assert 0 <= v <= 1
    assert v == true_cf_tvar1(u, -s, sin_a, gamma, alpha)


def test_rv_target_values():
    u = np.linspace(0, 1, 10**6 + 1)
    assert np.trapezoid(sigma_smile(u) ** 2, u) == pytest.approx(INT_SIGMA2, rel=1e-9)
    t = integrated_target_rv(sigma_smile, 1.0, 1000)
    assert t == pytest.approx(RIEMANN_1000, rel=1e-12)
    assert abs(t - INT_SIGMA2) < 1e-4
    assert integrated_target_rv(lambda u: np.ones_like(u), 1.0, 37) == pytest.approx(1.0)


def test_rv_mean_matches_target():
    spec = smile_ma_spec()
    T = 1000
    rv = np.array([realized_volatility(simulate(spec, T, derive_seed(3, r), root_t_scaled=True))
                   for r in range(1000)])
    target = integrated_target_rv(sigma_smile, 1.25 * 0.8, T)
    assert abs(rv.mean() - target) < 3 * rv.std(ddof=1) / math.sqrt(rv.size)
