"""Percentiles away from the median
===================================

For normal components the deviation of the (1/2 - tau) quantile rank past
the mixture quantile F_N^{-1}(1/2 + tau) shrinks like 1/sqrt(n), with a
weight that discounts components whose scale is small relative to the
quantile.  We print the deviation for a few tau and check it against the
exact tail.
"""

import numpy as np

from hetquant import HeteroSample, order_stat_upper_tail
from hetquant.bounds import normal_percentile_bound

rng = np.random.default_rng(4)
sigmas = 10 * np.exp(rng.uniform(0, 0.2, size=400))
s = HeteroSample.of("normal", sigmas)

# %% Deviation and exact tail for a few tau.
t = 0.5
print(" tau   deviation  ok     bound    exact")
for tau in (0.0, 0.05, 0.1, 0.2, 0.25):
    b = normal_percentile_bound(sigmas, tau, t)
    exact = order_stat_upper_tail(s, b.upper_p, b.upper.threshold).prob
    print(f"{tau:4.2f}  {b.upper.radius:9.4f}  {b.upper.condition_ok!s:5}  {b.upper.prob_bound:.4f}   {exact:.2e}")

# %% Larger t buys a smaller failure probability at a wider deviation.
# 2 exp(-2t) exceeds 1 below t = log(2)/2, and large t breaks the validity condition.
for t in (0.25, 1.0, 2.0):
    b = normal_percentile_bound(sigmas, 0.1, t)
    print(f"t={t}: deviation {b.upper.radius:.3f}, bound {b.upper.prob_bound:.4f}, ok {b.upper.condition_ok}")
