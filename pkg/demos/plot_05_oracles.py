"""
Reference checks
================

Brute-force enumeration of the bootstrap law on a tiny series, and a Monte
Carlo estimate of the limiting variance for squared observations.
"""

import numpy as np

from lbblab.lbb import LbbPlan, bootstrap_variance_exact
from lbblab.oracle import enumerate_bootstrap_law, limiting_variance_mc
from lbblab.process import Path, smile_ma_spec
from lbblab.stats import FunctionalFamily, global_root_weights, unit_weights

sq = FunctionalFamily("square")

# 4 blocks, 3 shifts each: 81 equally likely bootstrap series
path = Path(np.arange(1.0, 9.0))
plan = LbbPlan(8, 2, 1)
law = enumerate_bootstrap_law(path, plan, unit_weights(8), sq)
print("outcomes:", len(law))
print("variance by enumeration:", law.variance)
print("variance by shift sums :", bootstrap_variance_exact(path, plan, unit_weights(8), sq))

# Limiting variance of T**-0.5 sum X_t**2 for the smile moving average.
# Analytically 2.64 * int sigma(u)**4 du = 1.00132e-4.
lv = limiting_variance_mc(smile_ma_spec(), global_root_weights, sq, n_paths=200, T_grid=(1000, 2000))
print("V by T:", {T: f"{v:.4e}" for T, v in lv.by_T.items()})
print("lag terms (share of V):", np.round(lv.lag_terms / lv.value, 3))
