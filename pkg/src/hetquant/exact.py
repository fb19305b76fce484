"""Exact order-statistic probabilities through the Poisson-binomial law.

For a threshold ``t`` the count ``#{k : X_k >= t}`` is a sum of independent
Bernoulli variables with success probabilities ``1 - F_k(t)``; the event
``X^(m) >= t`` (``m``-th largest) is exactly ``count >= m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distributions import DomainError, HeteroSample

__all__ = [
    "ExactTail",
    "rank_index",
    "poisson_binomial_pmf",
    "poisson_binomial_tail",
    "order_stat_upper_tail",
    "order_stat_cdf",
    "exact_two_sided_median",
]


def rank_index(p: float, n: int) -> int:
    """``floor(p * n)``, robust to decimal inputs like ``p = 0.29``."""
    if isinstance(p, Fraction):
        return math.floor(p * n)
    prod = float(p) * n
    nearest = round(prod)
    if abs(prod - nearest) <= 1e-9 * max(1.0, abs(prod)):
        return int(nearest)
    return math.floor(prod)


@dataclass(frozen=True)
class ExactTail:
    prob: float
    m: int
    t: float


def poisson_binomial_pmf(probs: Sequence[float]) -> np.ndarray:
    """Distribution of a sum of independent Bernoulli variables.

    Builds the pmf one trial at a time in a single ``n + 1`` buffer.  Every
    update is a convex combination of nonnegative numbers, so entries keep
    full relative precision even deep in the tails.
    """
    p = np.asarray(probs, dtype=float).ravel()
    if p.size and not np.all((p >= 0.0) & (p <= 1.0)):
        raise DomainError("Bernoulli probabilities must lie in [0, 1]")
    n = p.size
    q = np.zeros(n + 1)
    q[0] = 1.0
    for j, pk in enumerate(p, start=1):
        # right-hand side is materialized before the slice is overwritten
        q[1 : j + 1] = q[1 : j + 1] * (1.0 - pk) + q[0:j] * pk
        q[0] *= 1.0 - pk
    np.maximum(q, 0.0, out=q)
    return q


def _tail_sum(values: np.ndarray) -> float:
    # smallest terms first; fsum then rounds the total exactly once
    return math.fsum(np.sort(values))


def poisson_binomial_tail(probs: Sequence[float], m: int) -> float:
    """``P(sum B_k >= m)`` for ``0 <= m <= n + 1``."""
    pmf = poisson_binomial_pmf(probs)
    n = pmf.size - 1
    if not (isinstance(m, (int, np.integer)) and 0 <= m <= n + 1):
        raise DomainError(f"m must be an integer in [0, {n + 1}], got {m!r}")
    if m == 0:
        return 1.0
    if m == n + 1:
        return 0.0
    return min(1.0, _tail_sum(pmf[m:]))


def _order_index(sample: HeteroSample, p: float) -> int:
    p_ = float(p)
    if not 0.0 < p_ <= 1.0:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    m = rank_index(p, sample.n)
    if m < 1:
        raise DomainError(f"need p * n >= 1, got p={p_}, n={sample.n}")
    return m


def order_stat_upper_tail(sample: HeteroSample, p: float, t: float) -> ExactTail:
    """``P(X^(floor(pn)) >= t)``, order statistics counted from the largest."""
    m = _order_index(sample, p)
    probs = sample.component_sfs(t)
    return ExactTail(prob=poisson_binomial_tail(probs, m), m=m, t=float(t))


def order_stat_cdf(sample: HeteroSample, p: float, t: float) -> float:
    """``P(X^(floor(pn)) <= t) = P(sum B_k <= m - 1)``."""
    m = _order_index(sample, p)
    pmf = poisson_binomial_pmf(sample.component_sfs(t))
    return min(1.0, _tail_sum(pmf[:m]))


def exact_two_sided_median(sample: HeteroSample, t: float) -> float:
    """``P(|M| >= t)`` for ``M = X^(floor(n/2))`` (descending)."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if sample.n < 2:
        raise DomainError("the median statistic needs n >= 2")
    half = Fraction(1, 2)
    upper = order_stat_upper_tail(sample, half, t).prob
    lower = order_stat_cdf(sample, half, -t)
    return min(1.0, max(0.0, upper + lower))
