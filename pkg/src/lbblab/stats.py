"""Weights, functionals and the weighted statistics built from them."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .process import Path

__all__ = [
    "KERNELS",
    "epanechnikov",
    "uniform",
    "KernelLocal",
    "GlobalRoot",
    "Unit",
    "WeightScheme",
    "kernel_weights",
    "global_root_weights",
    "unit_weights",
    "FunctionalFamily",
    "local_ecf",
    "realized_volatility",
    "weighted_statistic",
    "true_cf_tvar1",
]


def epanechnikov(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= 1, 0.75 * (1 - x * x), 0.0)


def uniform(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= 1, 0.5, 0.0)


KERNELS: dict[str, Callable] = {"epanechnikov": epanechnikov, "uniform": uniform}


@dataclass(frozen=True)
class KernelLocal:
    u: float
    b_T: float
    kernel_name: str = "epanechnikov"


@dataclass(frozen=True)
class GlobalRoot:
    pass


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class WeightScheme:
    """Non-negative weights w_{1,T}, ..., w_{T,T}.

    ``d_T`` counts the strictly positive weights and ``C_w`` is the smallest
    constant with ``max w <= C_w / sqrt(d_T)``.
    """

    weights: np.ndarray
    kind: KernelLocal | GlobalRoot | Unit | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-D array")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        # unit weights belong to already-scaled paths, not to the weight bound
        if not isinstance(self.kind, Unit) and self.d_T >= 1 and self.C_w > 10:
            warnings.warn(f"weight scheme has C_w = {self.C_w:.3g} > 10", stacklevel=3)

    @property
    def T(self) -> int:
        return self.weights.size

    @property
    def d_T(self) -> int:
        return int(np.count_nonzero(self.weights > 0))

    @property
    def C_w(self) -> float:
        if self.d_T == 0:
            return 0.0
        return float(self.weights.max() * math.sqrt(self.d_T))

    @property
    def support(self) -> np.ndarray:
        """0-based positions of the strictly positive weights."""
        return np.flatnonzero(self.weights > 0)


def kernel_weights(u: float, b_T: float, T: int, kernel: str = "epanechnikov") -> WeightScheme:
    """w_{t,T} = (b_T T)**-0.5 K((t/T - u) / b_T)."""
    if not 0 < b_T < 1:
        raise ValueError(f"bandwidth must lie in (0, 1), got {b_T}")
    if T < 1:
        raise ValueError("T must be >= 1")
    try:
        K = KERNELS[kernel.lower()]
    except KeyError:
        raise ValueError(f"unknown kernel {kernel!r}; choose from {sorted(KERNELS)}") from None
    if u + b_T <= 0 or u - b_T >= 1:
        raise ValueError(f"kernel window u={u} +- {b_T} does not intersect (0, 1)")
    if u - b_T < 0 or u + b_T > 1:
        warnings.warn("kernel window extends beyond [0, 1]; using a partial window", stacklevel=2)
    t = np.arange(1, T + 1)
    w = K((t / T - u) / b_T) / math.sqrt(b_T * T)
    if not np.any(w > 0):
        raise ValueError("kernel window contains no observation")
    return WeightScheme(w, KernelLocal(u, b_T, kernel.lower()))


def global_root_weights(T: int) -> WeightScheme:
    """Constant weights T**-0.5."""
    if T < 1:
        raise ValueError("T must be >= 1")
    return WeightScheme(np.full(T, 1.0 / math.sqrt(T)), GlobalRoot())


def unit_weights(T: int) -> WeightScheme:
    """All weights one; turns the weighted sum into a plain sum."""
    return WeightScheme(np.ones(T), Unit())


# ---------------------------------------------------------------------------
# functionals


_FAMILIES = ("cos", "sin", "square", "ecf_modulus_diff")


@dataclass(frozen=True)
class FunctionalFamily:
    """f(s, x) for one of the supported families.

    ``cos``/``sin``: cos(<s, x>) and sin(<s, x>), bounded by one.
    ``square``: |x|_2**2 (unbounded, needs moments of order 4 + delta).
    ``ecf_modulus_diff``: |exp(i <s, x>) - 1| = 2 |sin(<s, x> / 2)|.
    """

    kind: str
    s: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if self.kind not in _FAMILIES:
            raise ValueError(f"unknown family {self.kind!r}; choose from {_FAMILIES}")
        object.__setattr__(self, "s", tuple(float(v) for v in np.atleast_1d(self.s)))

    @property
    def bounded(self) -> bool:
        return self.kind != "square"

    def _phase(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        s = np.asarray(self.s)
        if x.ndim == 1:
            if s.size != 1:
                raise ValueError("1-D input needs a scalar s")
            return s[0] * x
        return x @ np.broadcast_to(s, (x.shape[-1],))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate on an ``(n,)`` or ``(n, d)`` array of points."""
        x = np.asarray(x, dtype=float)
        if self.kind == "square":
            return x * x if x.ndim == 1 else np.sum(x * x, axis=-1)
        p = self._phase(x)
        if self.kind == "cos":
            return np.cos(p)
        if self.kind == "sin":
            return np.sin(p)
        return 2.0 * np.abs(np.sin(0.5 * p))


def _check_lengths(path: Path, weights: WeightScheme):
    if path.T != weights.T:
        raise ValueError(f"path has T={path.T} but weights have T={weights.T}")


def weighted_statistic(path: Path, weights: WeightScheme, f: FunctionalFamily) -> float:
    """sum_t w_{t,T} f(s, X_{t,T}), uncentred."""
    _check_lengths(path, weights)
    idx = weights.support
    return float(np.dot(weights.weights[idx], f(path.values[idx])))


def local_ecf(path: Path, weights: WeightScheme, s) -> complex:
    """(b_T T)**-1 sum_t K((t/T - u) / b_T) exp(i <s, X_{t,T}>)."""
    _check_lengths(path, weights)
    if not isinstance(weights.kind, KernelLocal):
        raise ValueError("local_ecf needs kernel-local weights")
    s = np.atleast_1d(np.asarray(s, dtype=float))
    idx = weights.support
    phase = path.values[idx] @ np.broadcast_to(s, (path.dimension,))
    # kernel weights carry (b_T T)**-0.5, the estimator needs (b_T T)**-1
    scale = 1.0 / math.sqrt(weights.kind.b_T * path.T)
    return complex(scale * np.dot(weights.weights[idx], np.exp(1j * phase)))


def realized_volatility(path: Path) -> float:
    """RV = sum_t X_{t,T}**2 of a univariate path."""
    if path.dimension != 1:
        raise ValueError("realized volatility needs a univariate path")
    x = path.x
    return float(np.dot(x, x))


def true_cf_tvar1(u, s, a_fn, gamma: float, alpha: float):
    """Characteristic function of the symmetric-stable AR(1) companion at u.

    exp(-gamma**alpha |s|**alpha / (1 - |a(u)|**alpha)), with gamma the
    innovation scale.
    """
    if not 0 < alpha <= 2:
        raise ValueError("alpha must lie in (0, 2]")
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    a = np.abs(np.asarray(a_fn(np.asarray(u, dtype=float)), dtype=float))
    if np.any(a >= 1):
        raise ValueError("|a(u)| must be < 1")
    out = np.exp(-(gamma**alpha) * np.abs(s) ** alpha / (1.0 - a**alpha))
    return float(out) if np.ndim(out) == 0 else out
