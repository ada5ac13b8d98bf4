"""Local block bootstrap.

The series is cut into ``T // L`` consecutive blocks of length ``L``. Block
``i`` of a bootstrap series is the stretch of the original series shifted by
an independent uniform draw ``k_i`` from ``{-TD, ..., TD}``; when the shifted
block leaves ``[1, T]`` the opposite shift ``-k_i`` is used. Positions after
the last full block keep their original values.

Because blocks are resampled independently, the bootstrap mean and variance
of a weighted statistic are available exactly by enumerating the ``2 TD + 1``
shifts of each block separately.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .process import Path
from .stats import FunctionalFamily, WeightScheme

__all__ = [
    "LbbPlan",
    "EndpointSets",
    "RateReport",
    "validate_rates",
    "draw_shifts",
    "resample_indices",
    "lbb_resample",
    "shift_table",
    "bootstrap_mean_exact",
    "bootstrap_variance_exact",
    "bootstrap_distribution",
    "exact_moments",
    "centered_draws",
    "symmetric_ci",
]

# float64 elements per chunk when materialising (B, n) index tables
_CHUNK = 2_000_000


@dataclass(frozen=True)
class EndpointSets:
    """1-based indices within ``TD`` of either end of the series."""

    EP1: range
    EP2: range


@dataclass(frozen=True)
class LbbPlan:
    """Validated bootstrap layout.

    Parameters
    ----------
    T : int
        Series length.
    L : int
        Block length ``L_T``.
    TD : int
        Half window ``T * D_T``; shifts are drawn from ``{-TD, ..., TD}``.
    """

    T: int
    L: int
    TD: int

    def __post_init__(self):
        T, L, TD = self.T, self.L, self.TD
        if not 1 <= L <= T:
            raise ValueError(f"need 1 <= L <= T, got L={L}, T={T}")
        if not 1 <= TD < T:
            raise ValueError(f"need 1 <= TD < T, got TD={TD}, T={T}")
        # a block fails both signs iff it sits within TD of both ends;
        # checking the largest shift is enough
        starts = np.arange(self.n_blocks) * L
        bad = (starts < TD) & (starts + L - 1 + TD > T - 1)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise ValueError(
                f"block {i} cannot be shifted by +-{TD} inside [1, {T}] (L={L}); "
                "reduce TD or L"
            )

    @classmethod
    def from_fraction(cls, T: int, L: int, D: float) -> "LbbPlan":
        """Build from a real window parameter ``D``, rounding ``T * D``."""
        td = T * D
        TD = int(round(td))
        if not math.isclose(td, TD, rel_tol=0, abs_tol=1e-9):
            warnings.warn(f"T*D = {td:g} is not an integer; using TD = {TD}", stacklevel=2)
        return cls(T, L, TD)

    @property
    def n_blocks(self) -> int:
        return self.T // self.L

    @property
    def n_shifts(self) -> int:
        return 2 * self.TD + 1

    @property
    def block_starts(self) -> np.ndarray:
        """1-based first index of every full block."""
        return 1 + np.arange(self.n_blocks) * self.L

    @property
    def tail(self) -> np.ndarray:
        """1-based indices after the last full block (copied unchanged)."""
        return np.arange(self.n_blocks * self.L + 1, self.T + 1)

    @property
    def endpoints(self) -> EndpointSets:
        return EndpointSets(range(1, self.TD + 1), range(self.T - self.TD + 1, self.T + 1))

    def block_of(self, pos: np.ndarray) -> np.ndarray:
        """Block number of 0-based positions; ``-1`` for tail positions."""
        b = np.asarray(pos) // self.L
        return np.where(b < self.n_blocks, b, -1)

    def effective_shifts(self, k: np.ndarray, block: np.ndarray) -> np.ndarray:
        """Apply the reflection rule: ``k`` if block stays inside, else ``-k``."""
        start = np.asarray(block) * self.L
        ok = (start + k >= 0) & (start + self.L - 1 + k <= self.T - 1)
        return np.where(ok, k, -k)


# ---------------------------------------------------------------------------
# rate diagnostics


@dataclass(frozen=True)
class RateReport:
    T: int
    L: int
    TD: int
    d_T: int
    delta: float
    block_ratio: float
    window_lower_ratio: float
    window_upper_ratio: float
    block_grows: bool
    block_ok: bool
    window_lower_ok: bool
    window_upper_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.block_grows and self.block_ok and self.window_lower_ok and self.window_upper_ok

    def lines(self) -> list[str]:
        def flag(ok):
            return "pass" if ok else "warn"

        return [
            f"T={self.T}",
            f"L={self.L}",
            f"TD={self.TD}",
            f"d_T={self.d_T}",
            f"delta={self.delta:g}",
            f"L_growing={flag(self.block_grows)}",
            f"L/d_T^(delta/(2(1+delta)))={self.block_ratio:.6g} {flag(self.block_ok)}",
            f"d_T^(2delta/(2+delta))/TD={self.window_lower_ratio:.6g} {flag(self.window_lower_ok)}",
            f"TD/d_T^(1/(2+delta))={self.window_upper_ratio:.6g} {flag(self.window_upper_ok)}",
        ]


def validate_rates(T: int, L: int, TD: int, d_T: int, delta: float, bound: float = 1.0) -> RateReport:
    """Evaluate the block-length and window rate relations at one sample size.

    The relations are asymptotic, so nothing here raises: each ratio is
    reported with a ``pass`` flag when it is below ``bound`` (``< 1`` for the
    little-o relation). A constant block length ``L = 1`` is flagged since
    the block length has to grow.
    """
    if min(T, L, TD, d_T) <= 0:
        raise ValueError("T, L, TD and d_T must be positive")
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    block_ratio = L / d_T ** (delta / (2 * (1 + delta)))
    lower = d_T ** (2 * delta / (2 + delta)) / TD
    upper = TD / d_T ** (1 / (2 + delta))
    return RateReport(
        T, L, TD, d_T, delta, block_ratio, lower, upper,
        block_grows=L > 1,
        block_ok=block_ratio < 1,
        window_lower_ok=lower <= bound,
        window_upper_ok=upper <= bound,
    )


# ---------------------------------------------------------------------------
# resampling


def draw_shifts(plan: LbbPlan, rng, size: int | None = None) -> np.ndarray:
    """i.i.d. uniform shifts for every block, shape ``(n_blocks,)`` or ``(size, n_blocks)``."""
    shape = (plan.n_blocks,) if size is None else (size, plan.n_blocks)
    return np.asarray(rng.integers(-plan.TD, plan.TD + 1, size=shape), dtype=np.int64)


def resample_indices(plan: LbbPlan, shifts: np.ndarray, positions: np.ndarray | None = None) -> np.ndarray:
    """0-based source indices of X* for given block shifts.

    ``shifts`` may carry leading batch dimensions; ``positions`` restricts the
    output to selected 0-based target positions.
    """
    shifts = np.asarray(shifts, dtype=np.int64)
    if shifts.shape[-1] != plan.n_blocks:
        raise ValueError(f"expected {plan.n_blocks} shifts, got {shifts.shape[-1]}")
    pos = np.arange(plan.T) if positions is None else np.asarray(positions, dtype=np.int64)
    block = plan.block_of(pos)
    in_block = block >= 0
    k = np.zeros(shifts.shape[:-1] + pos.shape, dtype=np.int64)
    k[..., in_block] = shifts[..., block[in_block]]
    k = plan.effective_shifts(k, np.where(in_block, block, 0))
    return pos + np.where(in_block, k, 0)


def lbb_resample(path: Path, plan: LbbPlan, rng) -> Path:
    """One local-block-bootstrap replicate X*_{1,T}, ..., X*_{T,T}."""
    if plan.T != path.T:
        raise ValueError(f"plan has T={plan.T} but path has T={path.T}")
    idx = resample_indices(plan, draw_shifts(plan, rng))
    return Path(path.values[idx], path.spec_id, path.seed)


def shift_table(plan: LbbPlan, positions: np.ndarray) -> np.ndarray:
    """Source indices for every shift: ``table[k + TD, p]`` for position ``p``."""
    ks = np.arange(-plan.TD, plan.TD + 1)
    shifts = np.broadcast_to(ks[:, None], (ks.size, plan.n_blocks))
    return resample_indices(plan, shifts, positions)


# ---------------------------------------------------------------------------
# exact moments and Monte Carlo draws on precomputed f-values


def _support_fx(fx, weights: WeightScheme, plan: LbbPlan):
    fx = np.asarray(fx)
    if fx.shape[0] != plan.T or weights.T != plan.T:
        raise ValueError("f-values, weights and plan disagree on T")
    pos = weights.support
    return fx, pos, weights.weights[pos]


def exact_moments(fx, weights: WeightScheme, plan: LbbPlan) -> tuple:
    """Exact E* and Var* of sum_t w_t fx[X*-index of t].

    ``fx`` holds f(s, X_t) for t = 1..T and may be complex, in which case the
    variance is E*|S - E*S|**2.
    """
    fx, pos, w = _support_fx(fx, weights, plan)
    if pos.size == 0:
        return 0.0, 0.0
    table = shift_table(plan, pos)
    contrib = w * fx[table]
    mean = contrib.mean(axis=0).sum()
    block = plan.block_of(pos)
    var = 0.0
    full = block >= 0
    if np.any(full):
        # block sums for every shift, then the per-block variance over shifts
        nb = plan.n_blocks
        sums = np.zeros((plan.n_shifts, nb), dtype=contrib.dtype)
        for k in range(plan.n_shifts):
            sums[k] = np.bincount(block[full], weights=contrib[k, full].real, minlength=nb)
            if np.iscomplexobj(contrib):
                sums[k] = sums[k] + 1j * np.bincount(block[full], weights=contrib[k, full].imag,
                                                     minlength=nb)
        dev = sums - sums.mean(axis=0)
        var = float(np.sum(np.mean(np.abs(dev) ** 2, axis=0)))
    return mean, var


def centered_draws(fx, weights: WeightScheme, plan: LbbPlan, B: int, rng) -> np.ndarray:
    """B draws of sum_t w_t (fx[X*_t] - E* fx[X*_t]) by explicit resampling."""
    if B < 1:
        raise ValueError("B must be >= 1")
    fx, pos, w = _support_fx(fx, weights, plan)
    out = np.empty(B, dtype=np.result_type(fx.dtype, np.float64))
    if pos.size == 0:
        out[:] = 0
        return out
    table = shift_table(plan, pos)
    centre = (w * fx[table]).mean(axis=0)
    shifts = draw_shifts(plan, rng, size=B)
    chunk = max(1, _CHUNK // pos.size)
    for lo in range(0, B, chunk):
        idx = resample_indices(plan, shifts[lo : lo + chunk], pos)
        out[lo : lo + chunk] = (w * fx[idx] - centre).sum(axis=1)
    return out


def bootstrap_mean_exact(path: Path, plan: LbbPlan, weights: WeightScheme, f: FunctionalFamily) -> float:
    """E*[sum_t w_t f(s, X*_t)] by enumerating every block shift."""
    _check(path, plan, weights)
    return float(exact_moments(f(path.values), weights, plan)[0])


def bootstrap_variance_exact(path: Path, plan: LbbPlan, weights: WeightScheme,
                             f: FunctionalFamily) -> float:
    """Var*[sum_t w_t f(s, X*_t)], summing independent per-block variances."""
    _check(path, plan, weights)
    return float(exact_moments(f(path.values), weights, plan)[1])


def bootstrap_distribution(path: Path, plan: LbbPlan, weights: WeightScheme, f: FunctionalFamily,
                           B: int, rng) -> np.ndarray:
    """B draws of the centred bootstrap statistic sum_t w_t (f(X*_t) - E* f(X*_t))."""
    _check(path, plan, weights)
    return centered_draws(f(path.values), weights, plan, B, rng)


def _check(path: Path, plan: LbbPlan, weights: WeightScheme):
    if not path.T == plan.T == weights.T:
        raise ValueError(f"T mismatch: path {path.T}, plan {plan.T}, weights {weights.T}")


def symmetric_ci(estimate: float, bootstrap_samples, level: float) -> tuple[float, float]:
    """Symmetric interval estimate +- q, q the level-quantile of |samples|.

    Quantiles use linear interpolation between order statistics (type 7).
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    samples = np.abs(np.asarray(bootstrap_samples))
    if samples.size == 0:
        raise ValueError("need at least one bootstrap sample")
    q = float(np.quantile(samples, level, method="linear"))
    return estimate - q, estimate + q
