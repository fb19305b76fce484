"""Averaged CDF of a heterogeneous sample, its inverse, and interval density minima."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DomainError, HeteroSample, ScaledLaw

__all__ = [
    "QuantileResult",
    "mixture_cdf",
    "mixture_sf",
    "mixture_quantile",
    "density_min",
    "density_min_scan",
    "density_min_sum",
]

_REL_TOL = 1e-12
_MAX_ITER = 400


def _check_sample(sample: HeteroSample) -> None:
    if not isinstance(sample, HeteroSample) or sample.n < 1:
        raise DomainError("mixture needs a nonempty HeteroSample")


def mixture_cdf(sample: HeteroSample, t: float) -> float:
    """``F_N(t)``, the mean of the component CDFs (exactly rounded sum)."""
    _check_sample(sample)
    value = math.fsum(sample.component_cdfs(t)) / sample.n
    return min(1.0, max(0.0, value))


def mixture_sf(sample: HeteroSample, t: float) -> float:
    """``1 - F_N(t)`` summed from the component tails."""
    _check_sample(sample)
    value = math.fsum(sample.component_sfs(t)) / sample.n
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class QuantileResult:
    x: float
    achieved_p: float
    iterations: int


def mixture_quantile(sample: HeteroSample, p: float) -> QuantileResult:
    """Left-most ``x`` with ``F_N(x) >= p``.

    Bisection inside ``[min_k q_k(p), max_k q_k(p)]``: below the smallest
    component quantile every ``F_k < p`` and above the largest every
    ``F_k >= p``, so the average crosses ``p`` in between.
    """
    _check_sample(sample)
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")

    # compare in whichever tail keeps precision
    if p <= 0.5:
        def reached(x):
            return mixture_cdf(sample, x) >= p
    else:
        q = 1.0 - p

        def reached(x):
            return mixture_sf(sample, x) <= q

    qs = sample.component_quantiles(p)
    lo, hi = float(qs.min()), float(qs.max())
    iterations = 0
    if reached(lo):
        hi = lo
    while hi - lo > _REL_TOL * (1.0 + abs(hi)) and iterations < _MAX_ITER:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        iterations += 1
        if reached(mid):
            hi = mid
        else:
            lo = mid
    return QuantileResult(x=hi, achieved_p=mixture_cdf(sample, hi), iterations=iterations)


def _golden_min(f, a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def density_min_scan(law: ScaledLaw, lo: float, hi: float, points: int = 257) -> float:
    """Minimum density on ``[lo, hi]`` for laws with no shape guarantee.

    A grid scan locates the lowest cell, golden-section refines inside the
    neighbouring cells; endpoints are always candidates.
    """
    grid = np.linspace(lo, hi, points)
    values = np.asarray(law.pdf(grid))
    i = int(np.argmin(values))
    best = float(values[i])
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, points - 1)]
    if b > a:
        _, refined = _golden_min(lambda u: float(law.pdf(u)), float(a), float(b))
        best = min(best, refined)
    return best


def density_min(sample: HeteroSample, k: int, center: float, t: float) -> float:
    """Smallest density of component ``k`` (0-based) on ``[center - t, center + t]``."""
    _check_sample(sample)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if not 0 <= k < sample.n:
        raise DomainError(f"component index {k} out of range for n={sample.n}")
    law = sample[k]
    lo, hi = center - t, center + t
    if law.base.symmetric and law.base.unimodal:
        # density nonincreasing in |u|: the farther endpoint is the minimum
        return min(law.pdf(lo), law.pdf(hi))
    return density_min_scan(law, lo, hi)


def density_min_sum(sample: HeteroSample, p: float, t: float) -> float:
    """``sum_k min_{|u - tau| <= t} f_k(u)`` with ``tau = F_N^{-1}(1 - p)``."""
    _check_sample(sample)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    center = mixture_quantile(sample, 1.0 - p).x
    return math.fsum(density_min(sample, k, center, t) for k in range(sample.n))
