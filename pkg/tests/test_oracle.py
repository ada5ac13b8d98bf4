import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lbblab.lbb import LbbPlan, bootstrap_variance_exact, centered_draws, exact_moments
from lbblab.oracle import (
    ENUMERATION_GUARD,
    ExactBootstrapLaw,
    default_lag_horizon,
    enumerate_bootstrap_law,
    expected_functional,
    limiting_variance_mc,
    total_variation,
)
from lbblab.process import AlphaStable, Gaussian, Path, build_spec, smile_ma_spec, simulate
from lbblab.rng import derive_generator, derive_seed
from lbblab.stats import FunctionalFamily, global_root_weights, unit_weights

SQ = FunctionalFamily("square")
# 2.64 * int_0^1 sigma(u)**4 du, int sigma**4 = 3.792863492063492e-5 (mpmath):
# Var(eps**2) = 2 (1.25 * 0.8)**2 = 2, two lag-1 covariances 2 * 0.4**2 = 0.32 each
V_SMILE_MA = 1.0013159619047619e-4


def test_law_validation():
    with pytest.raises(ValueError):
        ExactBootstrapLaw(np.array([0.5, 0.6]), np.array([0.0, 1.0]))


def test_single_block_three_outcomes():
    x = Path(np.array([2.0, -1.0, 3.0]))
    law = enumerate_bootstrap_law(x, LbbPlan(3, 2, 1), unit_weights(3), SQ)
    assert len(law) == 3
    # shifts +1, 0, +1 after reflection
    raw = np.array([1 + 9, 4 + 1, 1 + 9]) + 9.0
    np.testing.assert_allclose(np.sort(law.values), np.sort(raw - raw.mean()))


def test_constant_path_law_is_zero():
    law = enumerate_bootstrap_law(Path(np.full(8, 1.5)), LbbPlan(8, 2, 1), unit_weights(8), SQ)
    np.testing.assert_allclose(law.values, 0.0, atol=1e-12)


def test_t8_instance():
    path = Path(np.arange(1.0, 9.0))
    plan = LbbPlan(8, 2, 1)
    law = enumerate_bootstrap_law(path, plan, unit_weights(8), SQ)
    assert len(law) == 81
    assert abs(law.mean) < 1e-10
    assert law.variance == pytest.approx(bootstrap_variance_exact(path, plan, unit_weights(8), SQ),
                                         abs=1e-10)
    assert law.variance == pytest.approx(643.5555555555555, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 14), st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32))
def test_enumeration_matches_exact_moments(T, L, TD, seed):
    try:
        plan = LbbPlan(T, L, TD)
    except ValueError:
        return
    if (2 * TD + 1) ** plan.n_blocks > 20_000:
        return
    g = np.random.default_rng(seed)
    path = Path(g.normal(size=T))
    w = unit_weights(T) if seed % 2 else global_root_weights(T)
    f = FunctionalFamily("cos", 1.3) if seed % 3 else SQ
    law = enumerate_bootstrap_law(path, plan, w, f)
    assert len(law) == (2 * TD + 1) ** plan.n_blocks
    assert abs(law.mean) < 1e-10
    assert law.variance == pytest.approx(exact_moments(f(path.values), w, plan)[1], abs=1e-10)


def test_guard():
    with pytest.raises(ValueError):
        enumerate_bootstrap_law(Path(np.zeros(40)), LbbPlan(40, 2, 2), unit_weights(40), SQ)
    assert ENUMERATION_GUARD == 10**6


def test_sampled_law_total_variation():
    path = Path(np.arange(1.0, 9.0))
    plan = LbbPlan(8, 2, 1)
    law = enumerate_bootstrap_law(path, plan, unit_weights(8), SQ)
    draws = centered_draws(SQ(path.values), unit_weights(8), plan, 10_000, derive_generator(4))
    assert total_variation(draws, law) < 0.05
    assert total_variation(law.values, law) < 1e-12


# -- limiting variance --------------------------------------------------------


def _iid(law=Gaussian(0.0, 1.0)):
    return build_spec("iid", law)


def test_lag_horizon():
    assert default_lag_horizon(smile_ma_spec()) == 3
    ar = build_spec("constant_ar", Gaussian(), a=0.5)
    assert default_lag_horizon(ar) == 3 * math.ceil(math.log(1e-3) / math.log(0.5))


def test_limiting_variance_iid_square():
    lv = limiting_variance_mc(_iid(), global_root_weights, SQ, n_paths=200, T_grid=(500, 1000),
                              seed=1, n_u=3)
    assert abs(lv.value - 2.0) < 0.15
    assert lv.lag_terms.size == 2 * lv.H + 1


def test_limiting_variance_constant_functional():
    lv = limiting_variance_mc(_iid(), global_root_weights, FunctionalFamily("cos", 0.0),
                              n_paths=100, T_grid=(500,), n_u=3)
    assert lv.value == pytest.approx(0.0, abs=1e-12)


def test_limiting_variance_smile_ma():
    # MC relative sd is about 1.1% at 400 paths
    lv = limiting_variance_mc(smile_ma_spec(), global_root_weights, SQ, n_paths=400,
                              T_grid=(1000, 2000), seed=3)
    assert lv.value == pytest.approx(V_SMILE_MA, rel=0.05)
    assert lv.by_T[1000] == pytest.approx(lv.by_T[2000], rel=0.01)
    assert lv.tail_fraction < 0.1


def test_limiting_variance_rejects_small_n():
    with pytest.raises(ValueError):
        limiting_variance_mc(_iid(), global_root_weights, SQ, n_paths=50)


def test_covariance_envelope_decays():
    spec = build_spec("constant_ar", Gaussian(), a=0.6)
    lv = limiting_variance_mc(spec, global_root_weights, SQ, n_paths=100, T_grid=(500,), n_u=3, seed=2)
    env = lv.cov_envelope
    assert np.all(np.diff(env[:5]) < 0)
    # Cov(X_0^2, X_h^2) = 2 a^{2h} / (1 - a^2)^2
    exact = 2 * 0.36 ** np.arange(5) / 0.64**2
    np.testing.assert_allclose(env[:5], exact, atol=0.1 * exact[0])


def test_short_horizon_warns():
    spec = build_spec("constant_ar", Gaussian(), a=0.8)
    with pytest.warns(UserWarning, match="increase H"):
        limiting_variance_mc(spec, global_root_weights, SQ, H=1, n_paths=100, T_grid=(500,), n_u=3)


# -- closed-form finite-T targets -------------------------------------------------


def test_expected_functional_gaussian_ma():
    spec = smile_ma_spec()
    m = expected_functional(spec, 10, SQ)
    u = np.arange(1, 11) / 10
    sig = 0.32 * (u - 0.5) ** 2 + 0.04
    np.testing.assert_allclose(m, sig**2 * 1.25 * 0.8, rtol=1e-14)


def test_expected_functional_stable_ar_mc():
    spec = build_spec("sin_ar", AlphaStable(1.5, 0.0, 0.5, 0.0))
    T = 60
    f = FunctionalFamily("cos", 1.0)
    exact = expected_functional(spec, T, f)
    sims = np.array([f(simulate(spec, T, derive_seed(9, r)).values) for r in range(4000)])
    se = sims.std(axis=0, ddof=1) / math.sqrt(sims.shape[0])
    assert np.all(np.abs(sims.mean(axis=0) - exact) < 4.5 * se)


def test_expected_functional_rejects_infinite_moment():
    spec = build_spec("iid", AlphaStable(1.5))
    with pytest.raises(ValueError):
        expected_functional(spec, 5, SQ)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(NotImplementedError):
            expected_functional(spec, 5, FunctionalFamily("ecf_modulus_diff", 1.0))
