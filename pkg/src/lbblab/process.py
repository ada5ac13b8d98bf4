"""Time-varying linear processes and their stationary companions.

Two model families are supported:

* ``TvMA``: X_{t,T} = mu(t/T) + sum_j A(t/T, j) eps_{t-j}, possibly two-sided,
  truncated at a lag chosen from a geometric decay bound.
* ``TvAR1``: X_{t,T} = a(t/T) X_{t-1,T} + eps_t started from
  X_{1,T} = a(1/T) eps_0 + eps_1.

All simulators draw innovations from one counter-based stream per seed, so a
process path, its companion and the truncated companion evaluated with the
same seed are coupled through identical eps_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.signal import lfilter

from .rng import stream_uniforms

__all__ = [
    "Gaussian",
    "AlphaStable",
    "InnovationLaw",
    "TvMA",
    "TvAR1",
    "ProcessSpec",
    "Path",
    "sample_innovation",
    "sample_innovations",
    "truncation_lag",
    "coef_array",
    "simulate",
    "simulate_tvma",
    "simulate_tvar1",
    "simulate_companion",
    "simulate_truncated_companion",
    "companion_values",
    "sigma_smile",
    "smile_ma_spec",
    "stable_sin_ar_spec",
    "build_spec",
    "PROCESS_REGISTRY",
]

DEFAULT_TRUNC_TOL = 1e-12
BURN_IN_FLOOR = 1000


# ---------------------------------------------------------------------------
# innovation laws


@dataclass(frozen=True)
class Gaussian:
    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if not (self.variance >= 0 and math.isfinite(self.variance)):
            raise ValueError(f"Gaussian variance must be >= 0, got {self.variance}")

    def transform(self, u: np.ndarray) -> np.ndarray:
        # Box-Muller, cosine branch only: one normal per stream index.
        z = np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
        return self.mean + math.sqrt(self.variance) * z


@dataclass(frozen=True)
class AlphaStable:
    """Stable law in the S1 parameterization.

    For ``beta = 0`` the characteristic function is
    ``exp(i mu s - gamma**alpha |s|**alpha)``.
    """

    alpha: float
    beta: float = 0.0
    gamma: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        if not 0 < self.alpha <= 2:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not -1 <= self.beta <= 1:
            raise ValueError(f"beta must lie in [-1, 1], got {self.beta}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")

    def transform(self, u: np.ndarray) -> np.ndarray:
        # Chambers-Mallows-Stuck
        a, b = self.alpha, self.beta
        v = np.pi * (u[:, 0] - 0.5)
        w = -np.log(u[:, 1])
        if a == 1.0:
            half_pi_bv = 0.5 * np.pi + b * v
            z = (2.0 / np.pi) * (
                half_pi_bv * np.tan(v) - b * np.log(0.5 * np.pi * w * np.cos(v) / half_pi_bv)
            )
            return self.gamma * z + (2.0 / np.pi) * b * self.gamma * math.log(self.gamma) + self.mu
        zeta = b * math.tan(0.5 * np.pi * a)
        shift = math.atan(zeta) / a
        scale = (1.0 + zeta * zeta) ** (0.5 / a)
        av = a * (v + shift)
        z = (
            scale
            * np.sin(av)
            / np.cos(v) ** (1.0 / a)
            * (np.cos(v - av) / w) ** ((1.0 - a) / a)
        )
        return self.gamma * z + self.mu


InnovationLaw = Union[Gaussian, AlphaStable]


def sample_innovations(
    law: InnovationLaw, seed: int, start: int, n: int, dim: int = 1
) -> np.ndarray:
    """Innovations eps_start, ..., eps_{start+n-1} as an ``(n, dim)`` array.

    Each eps_k is a function of ``(seed, k)`` alone.
    """
    out = np.empty((n, dim))
    for c in range(dim):
        out[:, c] = law.transform(stream_uniforms(seed, start, n, component=c))
    return out


def sample_innovation(law: InnovationLaw, seed: int, index: int = 0, dim: int = 1) -> np.ndarray:
    """The single innovation eps_index of the stream defined by ``seed``."""
    return sample_innovations(law, seed, index, 1, dim)[0]


# ---------------------------------------------------------------------------
# process specifications


@dataclass(frozen=True)
class TvMA:
    """Moving-average coefficients A(u, j).

    ``coef_fn(u, j)`` receives an array of rescaled times and an integer lag
    and returns values broadcastable to ``(len(u), d, d)``.
    """

    coef_fn: Callable[[np.ndarray, int], np.ndarray]
    decay_bound: tuple[float, float] | None = None
    finite_support: int | None = None
    causal: bool = False


@dataclass(frozen=True)
class TvAR1:
    a_fn: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProcessSpec:
    model: TvMA | TvAR1
    innovations: InnovationLaw
    mean_fn: Callable[[np.ndarray], np.ndarray] | None = None
    dimension: int = 1
    spec_id: str = "custom"
    decay_check_lags: int = field(default=50, repr=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        grid = np.linspace(0.0, 1.0, 101)
        if isinstance(self.model, TvMA):
            m = self.model
            if m.decay_bound is None and m.finite_support is None:
                raise ValueError("TvMA needs a decay_bound or a finite_support")
            if m.finite_support is not None and m.finite_support < 0:
                raise ValueError("finite_support must be >= 0")
            if m.decay_bound is not None:
                bound, theta = m.decay_bound
                if not (bound > 0 and 0 < theta < 1):
                    raise ValueError("decay_bound must be (B > 0, theta in (0, 1))")
                jmax = self.decay_check_lags
                if m.finite_support is not None:
                    jmax = min(jmax, m.finite_support)
                lags = range(0 if m.causal else -jmax, jmax + 1)
                for j in lags:
                    norm = _max_col_sum(coef_array(self, grid, j)).max()
                    if norm > bound * theta ** abs(j) * (1 + 1e-9):
                        raise ValueError(
                            f"|A(u, {j})|_1 = {norm:.4g} exceeds B*theta^|j| = "
                            f"{bound * theta ** abs(j):.4g}"
                        )
        elif isinstance(self.model, TvAR1):
            if self.dimension != 1:
                raise ValueError("TvAR1 is univariate")
            fine = np.linspace(0.0, 1.0, 1000)
            sup = np.max(np.abs(self.model.a_fn(fine)))
            if not sup < 1:
                raise ValueError(f"sup_u |a(u)| must be < 1, got {sup:.6g}")
        else:
            raise TypeError(f"unknown model {type(self.model).__name__}")

    @property
    def sup_ar(self) -> float:
        if not isinstance(self.model, TvAR1):
            raise TypeError("sup_ar is defined for TvAR1 only")
        return float(np.max(np.abs(self.model.a_fn(np.linspace(0.0, 1.0, 1000)))))

    def mean(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.mean_fn is None:
            return np.zeros((u.size, self.dimension))
        return np.broadcast_to(
            np.asarray(self.mean_fn(u), dtype=float).reshape(u.size, -1),
            (u.size, self.dimension),
        )


def _max_col_sum(a: np.ndarray) -> np.ndarray:
    return np.abs(a).sum(axis=-2).max(axis=-1)


def coef_array(spec: ProcessSpec, u: np.ndarray, j: int) -> np.ndarray:
    """A(u, j) as an ``(len(u), d, d)`` array (MA-infinity form for TvAR1)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    d = spec.dimension
    if isinstance(spec.model, TvAR1):
        a = spec.model.a_fn(u)
        vals = a**j if j >= 0 else np.zeros_like(u)
    else:
        vals = spec.model.coef_fn(u, j)
    vals = np.asarray(vals, dtype=float)
    if vals.ndim <= 1:
        vals = vals.reshape(-1, 1, 1)
    return np.broadcast_to(vals, (u.size, d, d))


def truncation_lag(spec: ProcessSpec, trunc_tol: float = DEFAULT_TRUNC_TOL) -> int:
    """Largest lag M* kept in the moving-average sum.

    ``finite_support`` when given; otherwise the smallest M with
    ``B theta**M / (1 - theta) < trunc_tol``.
    """
    if not trunc_tol > 0:
        raise ValueError("trunc_tol must be > 0")
    if isinstance(spec.model, TvAR1):
        bound, theta = 1.0, spec.sup_ar
        if theta == 0:
            return 0
    else:
        if spec.model.finite_support is not None:
            return spec.model.finite_support
        bound, theta = spec.model.decay_bound
    m = math.log(trunc_tol * (1 - theta) / bound) / math.log(theta)
    m = max(0, math.floor(m) + 1)
    while m > 0 and bound * theta ** (m - 1) / (1 - theta) < trunc_tol:
        m -= 1
    return m


def _lag_range(spec: ProcessSpec, max_lag: int) -> range:
    causal = isinstance(spec.model, TvAR1) or spec.model.causal
    return range(0 if causal else -max_lag, max_lag + 1)


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Path:
    values: np.ndarray
    spec_id: str = "custom"
    seed: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1:
            raise ValueError("values must have shape (T,) or (T, d) with T >= 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("path contains NaN or Inf")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    @property
    def x(self) -> np.ndarray:
        """Univariate values as a 1-D array."""
        if self.dimension != 1:
            raise ValueError("x is only defined for univariate paths")
        return self.values[:, 0]


# ---------------------------------------------------------------------------
# simulation


def _ma_sum(spec: ProcessSpec, u: np.ndarray, times: np.ndarray, lags, seed: int) -> np.ndarray:
    """mu(u_t) + sum_{j in lags} A(u_t, j) eps_{t-j} for each (u_t, t)."""
    lags = list(lags)
    d = spec.dimension
    lo = int(times.min()) - max(lags)
    hi = int(times.max()) - min(lags)
    eps = sample_innovations(spec.innovations, seed, lo, hi - lo + 1, d)
    out = spec.mean(u).copy()
    offset = times - lo
    for j in lags:
        a = coef_array(spec, u, j)
        e = eps[offset - j]
        if d == 1:
            out[:, 0] += a[:, 0, 0] * e[:, 0]
        else:
            out += np.einsum("tij,tj->ti", a, e)
    return out


def simulate_tvma(
    spec: ProcessSpec,
    T: int,
    trunc_tol: float = DEFAULT_TRUNC_TOL,
    seed: int = 0,
    root_t_scaled: bool = False,
) -> Path:
    """Simulate X_{1,T}, ..., X_{T,T} of a time-varying moving average.

    With ``root_t_scaled`` the whole path is multiplied by ``T**-0.5``
    (intraday-return scaling).
    """
    if not isinstance(spec.model, TvMA):
        raise TypeError("simulate_tvma needs a TvMA spec")
    if T < 1:
        raise ValueError("T must be >= 1")
    t = np.arange(1, T + 1)
    vals = _ma_sum(spec, t / T, t, _lag_range(spec, truncation_lag(spec, trunc_tol)), seed)
    if root_t_scaled:
        vals = vals / math.sqrt(T)
    return Path(vals, spec.spec_id, seed)


def simulate_tvar1(spec: ProcessSpec, T: int, seed: int = 0) -> Path:
    if not isinstance(spec.model, TvAR1):
        raise TypeError("simulate_tvar1 needs a TvAR1 spec")
    if T < 1:
        raise ValueError("T must be >= 1")
    eps = sample_innovations(spec.innovations, seed, 0, T + 1)[:, 0].tolist()
    a = spec.model.a_fn(np.arange(1, T + 1) / T).tolist()
    x = [0.0] * T
    prev = eps[0]
    for t in range(T):
        prev = a[t] * prev + eps[t + 1]
        x[t] = prev
    vals = np.asarray(x)[:, None] + spec.mean(np.arange(1, T + 1) / T)
    return Path(vals, spec.spec_id, seed)


def simulate(spec: ProcessSpec, T: int, seed: int = 0, trunc_tol: float = DEFAULT_TRUNC_TOL,
             root_t_scaled: bool = False) -> Path:
    """Dispatch on the model family."""
    if isinstance(spec.model, TvAR1):
        path = simulate_tvar1(spec, T, seed)
        if root_t_scaled:
            path = Path(path.values / math.sqrt(T), path.spec_id, seed)
        return path
    return simulate_tvma(spec, T, trunc_tol, seed, root_t_scaled)


def _burn_in(spec: ProcessSpec, trunc_tol: float) -> int:
    sup = spec.sup_ar
    if sup == 0:
        return BURN_IN_FLOOR
    return max(BURN_IN_FLOOR, math.ceil(math.log(trunc_tol) / math.log(sup)))


def companion_values(
    spec: ProcessSpec,
    u: np.ndarray,
    n: int,
    trunc_tol: float = DEFAULT_TRUNC_TOL,
    seed: int = 0,
) -> np.ndarray:
    """Companion paths X~_1(u), ..., X~_n(u) for several u at once.

    Returns an ``(len(u), n, d)`` array. All u share the innovation stream.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any((u < 0) | (u > 1)):
        raise ValueError("u must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    mu = spec.mean(u)
    if isinstance(spec.model, TvAR1):
        burn = _burn_in(spec, trunc_tol)
        eps = sample_innovations(spec.innovations, seed, 1 - burn, burn + n)[:, 0]
        a = np.asarray(spec.model.a_fn(u), dtype=float)
        out = np.empty((u.size, n, 1))
        for i, ai in enumerate(a):
            # x_k = a x_{k-1} + eps_k from x = 0 before the burn-in
            out[i, :, 0] = lfilter([1.0], [1.0, -ai], eps)[burn:]
        return out + mu[:, None, :]
    lags = list(_lag_range(spec, truncation_lag(spec, trunc_tol)))
    return _ma_block(spec, u, n, lags, seed, mu)


def _ma_block(spec, u, n, lags, seed, mu):
    d = spec.dimension
    lo = 1 - max(lags)
    eps = sample_innovations(spec.innovations, seed, lo, n + max(lags) - min(lags), d)
    out = np.broadcast_to(mu[:, None, :], (u.size, n, d)).copy()
    for j in lags:
        a = coef_array(spec, u, j)
        e = eps[max(lags) - j : max(lags) - j + n]
        if d == 1:
            out[:, :, 0] += a[:, 0, 0][:, None] * e[None, :, 0]
        else:
            out += np.einsum("uij,tj->uti", a, e)
    return out


def simulate_companion(
    spec: ProcessSpec,
    u: float,
    n: int,
    trunc_tol: float = DEFAULT_TRUNC_TOL,
    seed: int = 0,
) -> Path:
    """Strictly stationary companion X~_t(u), t = 1..n."""
    vals = companion_values(spec, np.array([u]), n, trunc_tol, seed)[0]
    return Path(vals, f"{spec.spec_id}@u={u:g}", seed)


def simulate_truncated_companion(spec: ProcessSpec, u: float, M: int, n: int, seed: int = 0) -> Path:
    """X~_t^{(M)}(u) = mu(u) + sum_{|j| < M} A(u, j) eps_{t-j}, t = 1..n.

    A TvAR1 spec is expanded into its moving-average form A(u, j) = a(u)**j.
    Lags beyond the companion's own truncation lag are dropped, so a large
    ``M`` reproduces :func:`simulate_companion` exactly for TvMA specs.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if not 0 <= u <= 1:
        raise ValueError("u must lie in [0, 1]")
    max_lag = M - 1
    if isinstance(spec.model, TvMA):
        max_lag = min(max_lag, truncation_lag(spec))
    uu = np.array([float(u)])
    lags = list(_lag_range(spec, max_lag))
    vals = _ma_block(spec, uu, n, lags, seed, spec.mean(uu))[0]
    return Path(vals, f"{spec.spec_id}@u={u:g},M={M}", seed)


# ---------------------------------------------------------------------------
# named specs


def sigma_smile(u, a: float = 0.32, c: float = 0.04):
    """Volatility smile sigma(u) = a (u - 1/2)**2 + c."""
    return a * (np.asarray(u, dtype=float) - 0.5) ** 2 + c


def smile_ma_spec(ma_coef: float = 0.5, variance: float = 0.8, smile_a: float = 0.32,
                  smile_c: float = 0.04) -> ProcessSpec:
    """sigma(t/T) eps_t with MA(1) noise eps_t = ma_coef * eta_{t-1} + eta_t."""

    def coef(u, j):
        s = sigma_smile(u, smile_a, smile_c)
        if j == 0:
            return s
        if j == 1:
            return ma_coef * s
        return np.zeros_like(s)

    return ProcessSpec(
        model=TvMA(coef, finite_support=1, causal=True),
        innovations=Gaussian(0.0, variance),
        spec_id="sigma_smile",
    )


def stable_sin_ar_spec(amp: float = 0.9, alpha: float = 1.5, gamma: float = 0.5,
                  beta: float = 0.0, mu: float = 0.0) -> ProcessSpec:
    """tvAR(1) with a(u) = amp sin(2 pi u) and symmetric stable noise."""
    return ProcessSpec(
        model=TvAR1(lambda u: amp * np.sin(2 * np.pi * np.asarray(u, dtype=float))),
        innovations=AlphaStable(alpha, beta, gamma, mu),
        spec_id="sin_ar",
    )


def _iid_spec(innovations: InnovationLaw, scale: float = 1.0) -> ProcessSpec:
    def coef(u, j):
        u = np.asarray(u, dtype=float)
        return np.full_like(u, scale) if j == 0 else np.zeros_like(u)

    return ProcessSpec(TvMA(coef, finite_support=0, causal=True), innovations, spec_id="iid")


def _constant_ar_spec(innovations: InnovationLaw, a: float = 0.5) -> ProcessSpec:
    return ProcessSpec(
        TvAR1(lambda u: np.full_like(np.asarray(u, dtype=float), a)), innovations,
        spec_id="constant_ar",
    )


def _sigma_smile_registry(innovations, ma_coef=0.5, smile_a=0.32, smile_c=0.04):
    spec = smile_ma_spec(ma_coef, smile_a=smile_a, smile_c=smile_c)
    return ProcessSpec(spec.model, innovations, spec_id=spec.spec_id)


def _sin_ar_registry(innovations, amp=0.9):
    return ProcessSpec(
        TvAR1(lambda u: amp * np.sin(2 * np.pi * np.asarray(u, dtype=float))),
        innovations,
        spec_id="sin_ar",
    )


PROCESS_REGISTRY: dict[str, Callable[..., ProcessSpec]] = {
    "sigma_smile": _sigma_smile_registry,
    "sin_ar": _sin_ar_registry,
    "iid": _iid_spec,
    "constant_ar": _constant_ar_spec,
}


def build_spec(name: str, innovations: InnovationLaw, **params) -> ProcessSpec:
    """Construct a registered process by name with numeric parameters."""
    try:
        factory = PROCESS_REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown process {name!r}; choose from {sorted(PROCESS_REGISTRY)}"
        ) from None
    return factory(innovations, **params)
