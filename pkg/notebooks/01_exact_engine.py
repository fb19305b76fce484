"""Exact order-statistic tails
==============================

The event "the m-th largest of n independent draws is at least t" happens
exactly when at least m of the indicators {X_k >= t} fire.  Those indicators
are independent Bernoulli variables with success probabilities 1 - F_k(t),
so the tail is a Poisson-binomial upper tail.  This walk-through checks the
reduction against brute force and then looks at a heterogeneous sample.
"""

import itertools
import math

import numpy as np

from hetquant import HeteroSample, order_stat_upper_tail, poisson_binomial_pmf

# %% Three fair coins: the pmf is binomial(3, 1/2).
print(poisson_binomial_pmf([0.5, 0.5, 0.5]))

# %% Brute force over all 2^n outcomes agrees with the O(n^2) recursion.
rng = np.random.default_rng(0)
probs = rng.uniform(size=10)
brute = np.zeros(11)
for outcome in itertools.product((0, 1), repeat=10):
    brute[sum(outcome)] += math.prod(p if b else 1 - p for b, p in zip(outcome, probs))
print("max |dp - brute| =", np.abs(poisson_binomial_pmf(probs) - brute).max())

# %% Median tails of identical normals.
# With three draws the largest exceeds 0 with probability 1 - 1/8.
print(order_stat_upper_tail(HeteroSample.of("normal", [1, 1, 1]), 0.5, 0.0).prob)

# %% A mixed sample: adding one very wide Cauchy draw keeps the tail on the scale of the quiet draws.
quiet = HeteroSample.of("normal", [1.0] * 9)
noisy = quiet.extended(HeteroSample.of("cauchy", [100.0]))
for t in (0.25, 0.5, 1.0):
    a = order_stat_upper_tail(quiet, 0.5, t).prob
    b = order_stat_upper_tail(noisy, 0.5, t).prob
    print(f"t={t:4.2f}  nine normals: {a:.4f}   plus one wide Cauchy: {b:.4f}")
