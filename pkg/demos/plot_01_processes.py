"""
Simulating locally stationary processes
=======================================

Two families ship with the package: time-varying moving averages and the
tvAR(1). Both draw their innovations from a counter-based stream, so the
process and its stationary companion can be coupled through the same eps_k.
"""

import numpy as np

from lbblab.process import smile_ma_spec, stable_sin_ar_spec, simulate, simulate_companion

# A moving average whose scale follows a volatility smile
ma = smile_ma_spec()
x = simulate(ma, 1000, seed=3).x
print("MA path, first values:", np.round(x[:5], 4))

# The same path with intraday scaling (multiplied by T**-0.5)
x_scaled = simulate(ma, 1000, seed=3, root_t_scaled=True).x
print("ratio scaled/unscaled:", x_scaled[0] / x[0])

# Local variance is small in the middle of the day and large at the edges
for lo in (0, 450, 900):
    print(f"sample variance on t={lo + 1}..{lo + 100}: {x[lo:lo + 100].var():.5f}")

# tvAR(1) with a(u) = 0.9 sin(2 pi u) and symmetric 1.5-stable noise
ar = stable_sin_ar_spec()
y = simulate(ar, 2000, seed=1).x
print("tvAR(1) median |X|:", np.median(np.abs(y)))

# Freezing time at u = 0.4 gives a stationary AR(1); the same seed shares eps_k
z = simulate_companion(ar, 0.4, 2000, seed=1).x
print("companion at u=0.4, first values:", np.round(z[:3], 4))
