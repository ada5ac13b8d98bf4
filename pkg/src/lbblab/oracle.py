"""Reference computations used to check the bootstrap and the simulators.

Nothing here calls into the resampling code in :mod:`lbblab.lbb`; the
enumeration re-implements the block shifting from scratch so the two can be
compared.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve

from .process import (
    DEFAULT_TRUNC_TOL,
    AlphaStable,
    Gaussian,
    Path,
    ProcessSpec,
    TvAR1,
    TvMA,
    coef_array,
    companion_values,
    truncation_lag,
)
from .rng import derive_seed
from .stats import FunctionalFamily, WeightScheme

__all__ = [
    "ENUMERATION_GUARD",
    "ExactBootstrapLaw",
    "enumerate_bootstrap_law",
    "LimitingVariance",
    "limiting_variance_mc",
    "default_lag_horizon",
    "integrated_target_rv",
    "expected_functional",
    "total_variation",
]

ENUMERATION_GUARD = 10**6


@dataclass(frozen=True)
class ExactBootstrapLaw:
    probabilities: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
            raise ValueError("probabilities must be non-negative and sum to one")

    @property
    def mean(self) -> float:
        return float(np.dot(self.probabilities, self.values))

    @property
    def variance(self) -> float:
        return float(np.dot(self.probabilities, (self.values - self.mean) ** 2))

    def __len__(self):
        return self.values.size


def enumerate_bootstrap_law(path: Path, plan, weights: WeightScheme, f: FunctionalFamily) -> ExactBootstrapLaw:
    """Every equally likely shift tuple of the local block bootstrap.

    ``plan`` only needs ``T``, ``L`` and ``TD`` attributes. Returns the law of
    the centred statistic sum_t w_t f(X*_t) - E*[...].
    """
    T, L, TD = plan.T, plan.L, plan.TD
    if path.T != T or weights.T != T:
        raise ValueError("T mismatch")
    n_blocks = T // L
    n_outcomes = (2 * TD + 1) ** n_blocks
    if n_outcomes > ENUMERATION_GUARD:
        raise ValueError(f"{n_outcomes} outcomes exceed the enumeration guard {ENUMERATION_GUARD}")
    x = path.values
    w = weights.weights
    stats = []
    for ks in itertools.product(range(-TD, TD + 1), repeat=n_blocks):
        xstar = x.copy()
        for i, k in enumerate(ks):
            first = i * L + 1 + k  # 1-based
            last = i * L + L + k
            if first < 1 or last > T:
                k = -k
                first, last = i * L + 1 + k, i * L + L + k
                if first < 1 or last > T:
                    raise ValueError(f"block {i} has no valid shift for k={-k}")
            for j in range(1, L + 1):
                xstar[i * L + j - 1] = x[i * L + j + k - 1]
        stats.append(float(np.sum(w * f(xstar))))
    values = np.asarray(stats)
    values = values - values.mean()
    return ExactBootstrapLaw(np.full(values.size, 1.0 / values.size), values)


def total_variation(sample: np.ndarray, law: ExactBootstrapLaw, decimals: int = 10) -> float:
    """Total-variation distance between an empirical sample and an exact law.

    Outcome values are matched after rounding to ``decimals`` places.
    """
    exact = {}
    for p, v in zip(law.probabilities, np.round(law.values, decimals)):
        exact[v] = exact.get(v, 0.0) + p
    vals, counts = np.unique(np.round(np.asarray(sample), decimals), return_counts=True)
    emp = dict(zip(vals, counts / counts.sum()))
    keys = set(exact) | set(emp)
    return 0.5 * sum(abs(exact.get(k, 0.0) - emp.get(k, 0.0)) for k in keys)


# ---------------------------------------------------------------------------
# limiting variance


@dataclass
class LimitingVariance:
    """Monte Carlo estimate of the limiting variance V(s1, s2).

    ``value`` is the estimate at the largest T; ``by_T`` holds every T of the
    grid. ``lag_terms[h + H]`` is the lag-h summand at the largest T and
    ``cov_envelope[h]`` the u-averaged |Cov| at lag h >= 0.
    """

    value: float
    by_T: dict[int, float]
    H: int
    lag_terms: np.ndarray
    cov_envelope: np.ndarray
    tail_fraction: float
    u_grid: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)


def default_lag_horizon(spec: ProcessSpec, tol: float = 1e-3) -> int:
    """Covariance lag horizon H.

    Finite moving averages of order J are (2J)-dependent, so ``2J + 1`` lags
    suffice; otherwise ``3 * ceil(log(tol) / log(theta))``.
    """
    if isinstance(spec.model, TvMA) and spec.model.finite_support is not None:
        return 2 * spec.model.finite_support + 1
    if isinstance(spec.model, TvAR1):
        theta = spec.sup_ar
    else:
        theta = spec.model.decay_bound[1]
    if theta == 0:
        return 1
    return 3 * math.ceil(math.log(tol) / math.log(theta))


def limiting_variance_mc(
    spec: ProcessSpec,
    weight_fn: Callable[[int], WeightScheme],
    f: FunctionalFamily,
    s1=None,
    s2=None,
    H: int | None = None,
    n_paths: int = 200,
    T_grid: Sequence[int] = (1000, 2000),
    seed: int = 0,
    n_u: int = 33,
    path_len: int = 512,
    trunc_tol: float = DEFAULT_TRUNC_TOL,
) -> LimitingVariance:
    """Estimate sum_h lim_T sum_t w_t w_{t+h} Cov(f(s1, X~_0(t/T)), f(s2, X~_h(t/T))).

    Lag covariances of the companion process are estimated on a grid of
    ``n_u`` rescaled times spanning the weight support and interpolated
    in u by a cubic spline. Each replication simulates one companion path per grid
    point (all points share the innovations) and all lags are read off that
    path. Weights are extended beyond [1, T] by their boundary values.
    """
    if n_paths < 100:
        raise ValueError("n_paths must be >= 100")
    H = default_lag_horizon(spec) if H is None else int(H)
    if H < 1:
        raise ValueError("H must be >= 1")
    f1 = FunctionalFamily(f.kind, f.s if s1 is None else s1)
    f2 = FunctionalFamily(f.kind, f.s if s2 is None else s2)
    T_grid = sorted(int(T) for T in T_grid)
    T_max = T_grid[-1]
    supp = weight_fn(T_max).support
    u_lo, u_hi = (supp[0] + 1) / T_max, (supp[-1] + 1) / T_max
    u_grid = np.linspace(u_lo, u_hi, n_u) if u_hi > u_lo else np.array([u_lo])

    n_total = path_len + 2 * H
    lags = np.arange(-H, H + 1)
    cross = np.zeros((u_grid.size, lags.size))
    s_1 = np.zeros(u_grid.size)
    s_2 = np.zeros(u_grid.size)
    count = 0
    pilot = None
    for r in range(n_paths):
        x = companion_values(spec, u_grid, n_total, trunc_tol, derive_seed(seed, r))
        a = f1(x.reshape(-1, spec.dimension)).reshape(u_grid.size, n_total)
        b = f2(x.reshape(-1, spec.dimension)).reshape(u_grid.size, n_total)
        # covariances are shift invariant; shifting by pilot means limits
        # cancellation and makes constant functionals exactly zero
        if pilot is None:
            pilot = a.mean(axis=1, keepdims=True), b.mean(axis=1, keepdims=True)
        a = a - pilot[0]
        b = b - pilot[1]
        # sum_t a[t] b[t+h] for t in the central window, all h at once
        core = a[:, H : H + path_len]
        corr = fftconvolve(b, core[:, ::-1], mode="valid", axes=1)
        cross += corr
        s_1 += core.sum(axis=1)
        s_2 += b[:, H : H + path_len].sum(axis=1)
        count += path_len
    cov = cross / count - (s_1 / count)[:, None] * (s_2 / count)[:, None]

    by_T = {}
    lag_terms = None
    for T in T_grid:
        terms = _lag_sums(weight_fn(T), cov, u_grid, lags)
        by_T[T] = float(terms.sum())
        lag_terms = terms
    value = by_T[T_max]
    edge = abs(lag_terms[0]) + abs(lag_terms[-1])
    tail_fraction = edge / abs(value) if value != 0 else (0.0 if edge == 0 else math.inf)
    if tail_fraction > 0.1:
        warnings.warn(
            f"lag-{H} terms are {tail_fraction:.1%} of the variance sum; increase H",
            stacklevel=2,
        )
    envelope = np.abs(cov).mean(axis=0)
    envelope = np.maximum(envelope[H:], envelope[H::-1])
    return LimitingVariance(value, by_T, H, lag_terms, envelope, tail_fraction, u_grid, cov)


def _lag_sums(weights: WeightScheme, cov: np.ndarray, u_grid: np.ndarray, lags: np.ndarray) -> np.ndarray:
    w = weights.weights
    T = w.size
    t = weights.support
    u = (t + 1) / T
    out = np.empty(lags.size)
    if u_grid.size >= 4:
        spline = CubicSpline(u_grid, cov, axis=0)
        cov_at = spline(np.clip(u, u_grid[0], u_grid[-1]))
    elif u_grid.size > 1:
        cov_at = np.stack([np.interp(u, u_grid, cov[:, i]) for i in range(lags.size)], axis=1)
    else:
        cov_at = np.broadcast_to(cov[0], (u.size, lags.size))
    for i, h in enumerate(lags):
        c = cov_at[:, i]
        out[i] = np.sum(w[t] * w[np.clip(t + h, 0, T - 1)] * c)
    return out


# ---------------------------------------------------------------------------
# closed-form targets


def integrated_target_rv(sigma_fn: Callable, innovation_variance: float, T: int) -> float:
    """Exact finite-T mean of RV: sum_t T**-1 sigma(t/T)**2 Var(eps)."""
    if T < 1:
        raise ValueError("T must be >= 1")
    u = np.arange(1, T + 1) / T
    return float(np.sum(np.asarray(sigma_fn(u), dtype=float) ** 2) * innovation_variance / T)


def _marginal_scale(spec: ProcessSpec, T: int) -> np.ndarray:
    """Per-t spread of X_{t,T} - mu(t/T): variance (Gaussian) or scale**alpha (stable)."""
    law = spec.innovations
    if isinstance(law, Gaussian):
        p, unit = 2.0, law.variance
    elif isinstance(law, AlphaStable) and law.beta == 0 and law.mu == 0:
        p, unit = law.alpha, law.gamma**law.alpha
    else:
        raise NotImplementedError("closed-form marginals need Gaussian or centred symmetric stable noise")
    u = np.arange(1, T + 1) / T
    if isinstance(spec.model, TvAR1):
        a = np.abs(spec.model.a_fn(u)) ** p
        out = np.empty(T)
        prev = unit  # eps_0
        for t in range(T):
            prev = a[t] * prev + unit
            out[t] = prev
        return out
    if spec.dimension != 1:
        raise NotImplementedError("closed-form marginals are univariate")
    M = truncation_lag(spec)
    causal = spec.model.causal
    total = np.zeros(T)
    for j in range(0 if causal else -M, M + 1):
        total += np.abs(coef_array(spec, u, j)[:, 0, 0]) ** p
    return unit * total


def expected_functional(spec: ProcessSpec, T: int, f: FunctionalFamily) -> np.ndarray:
    """E f(s, X_{t,T}) for t = 1..T, exactly, for univariate Gaussian or symmetric-stable specs.

    Gaussian innovations cover square/cos/sin, symmetric stable ones cos/sin.
    """
    if spec.dimension != 1:
        raise NotImplementedError("closed-form targets are univariate")
    spread = _marginal_scale(spec, T)
    mu = spec.mean(np.arange(1, T + 1) / T)[:, 0]
    gaussian = isinstance(spec.innovations, Gaussian)
    if gaussian:
        mu = mu + spec.innovations.mean * _coef_total(spec, T)
    if f.kind == "square":
        if not gaussian and spec.innovations.alpha < 2:
            raise ValueError("second moment is infinite for alpha < 2")
        if not gaussian:
            spread = 2 * spread  # alpha = 2: variance = 2 scale**2
        return mu**2 + spread
    s = f.s[0]
    if gaussian:
        damp = np.exp(-0.5 * s * s * spread)
    else:
        damp = np.exp(-spread * abs(s) ** spec.innovations.alpha)
    if f.kind == "cos":
        return np.cos(s * mu) * damp
    if f.kind == "sin":
        return np.sin(s * mu) * damp
    raise NotImplementedError(f"no closed form for {f.kind}")


def _coef_total(spec: ProcessSpec, T: int) -> np.ndarray:
    """sum_j A_{t,T}(j), the factor multiplying a non-zero innovation mean."""
    u = np.arange(1, T + 1) / T
    if isinstance(spec.model, TvAR1):
        a = spec.model.a_fn(u)
        out = np.empty(T)
        prev = 1.0
        for t in range(T):
            prev = a[t] * prev + 1.0
            out[t] = prev
        return out
    M = truncation_lag(spec)
    total = np.zeros(T)
    for j in range(0 if spec.model.causal else -M, M + 1):
        total += coef_array(spec, u, j)[:, 0, 0]
    return total
