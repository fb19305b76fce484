"""Closed-form concentration bounds for percentiles of heterogeneous samples.

Conventions
-----------
Order statistics are counted from the top: ``X^(1) >= ... >= X^(n)``, and
the percentile of level ``p`` is ``X^(floor(pn))``.  The median ``M`` is
``X^(floor(n/2))`` for both parities.

Every bound is returned as a :class:`TailBound`.  When a side condition of
the underlying inequality fails the bound is *vacuous*: ``prob_bound`` is
exactly 1 and ``condition_ok`` is False.  Conditions never raise; only
arguments outside the domain of the formulas do.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distributions import BaseLaw, DomainError, HeteroSample
from .exact import rank_index
from .mixture import density_min_sum, mixture_quantile, mixture_sf

__all__ = [
    "NORMAL_DENSITY_FLOOR",
    "NORMAL_RADIUS_CONSTANT",
    "CAUCHY_RADIUS_CONSTANT",
    "LAPLACE_RADIUS_CONSTANT",
    "Side",
    "PhiValue",
    "TailBound",
    "RadiusBound",
    "PercentileBounds",
    "parity_flag",
    "harmonic_sum",
    "phi_plus",
    "phi_minus",
    "theorem1_upper",
    "theorem1_lower",
    "corollary1_upper",
    "corollary1_lower",
    "theorem2_median_bound",
    "median_radius",
    "normal_median_radius",
    "cauchy_median_radius",
    "laplace_median_radius",
    "normal_percentile_bound",
]

# standard normal density on [-1/2, 1/2] never drops below this
NORMAL_DENSITY_FLOOR = 0.35
NORMAL_RADIUS_CONSTANT = 1.0 / NORMAL_DENSITY_FLOOR
# 1 / min_{|u|<=1/2} d(u) for the Cauchy and Laplace bases
CAUCHY_RADIUS_CONSTANT = 5.0 * math.pi / 4.0
LAPLACE_RADIUS_CONSTANT = 2.0 * math.sqrt(math.e)


class Side(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class PhiValue:
    value: float
    side: Side
    valid: bool


@dataclass(frozen=True)
class TailBound:
    """A probability bound on a tail event.

    ``threshold`` is the event boundary on the observation scale, ``radius``
    the deviation it encodes.  ``raw_bound`` is the formula value before
    capping at 1 (nan when the formula is undefined).
    """

    prob_bound: float
    condition_ok: bool
    condition_desc: str
    radius: float | None = None
    threshold: float | None = None
    raw_bound: float = math.nan

    @property
    def vacuous(self) -> bool:
        return self.prob_bound >= 1.0


@dataclass(frozen=True)
class RadiusBound(TailBound):
    """``P(|M| >= radius) <= prob_bound`` for a scale-family median.

    ``conservative_radius`` replaces the harmonic sum by ``n / max sigma``;
    it is never smaller than ``radius``.
    """

    conservative_radius: float = math.nan

    @property
    def coverage(self) -> float:
        """Probability with which ``|M| <= radius`` is guaranteed."""
        return 1.0 - self.prob_bound


@dataclass(frozen=True)
class PercentileBounds:
    """Off-median normal percentile bounds.

    ``upper`` bounds ``P(X^(floor(upper_p n)) >= upper.threshold)``;
    ``lower`` bounds ``P(X^(floor(lower_p n)) <= lower.threshold)``.
    """

    upper: TailBound
    lower: TailBound
    upper_p: float
    lower_p: float


def _make(raw: float, ok: bool, desc: str, **kw) -> TailBound:
    prob = min(1.0, raw) if ok else 1.0
    return TailBound(prob_bound=prob, condition_ok=ok, condition_desc=desc, raw_bound=raw, **kw)


def parity_flag(n: int, p: float) -> int:
    """0 when ``n p`` is an integer, else 1."""
    if isinstance(p, Fraction):
        return 0 if (p * n).denominator == 1 else 1
    prod = float(p) * n
    return 0 if abs(prod - round(prod)) <= 1e-9 * max(1.0, abs(prod)) else 1


def harmonic_sum(sigmas: Sequence[float]) -> float:
    """``sum_k 1 / sigma_k``."""
    s = _check_sigmas(sigmas)
    return math.fsum(1.0 / s)


def _check_sigmas(sigmas) -> np.ndarray:
    s = np.asarray(sigmas, dtype=float).ravel()
    if s.size == 0:
        raise DomainError("need at least one scale")
    if not np.all(np.isfinite(s) & (s > 0)):
        raise DomainError("scales must be positive and finite")
    return s


def _percentile_setup(sample: HeteroSample, p: float, t: float) -> tuple[int, float]:
    if not 0.0 < float(p) < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    m = rank_index(p, sample.n)
    if m < 1:
        raise DomainError(f"need p * n >= 1, got p={float(p)}, n={sample.n}")
    tau = mixture_quantile(sample, 1.0 - float(p)).x
    return m, tau


def _phi(sample: HeteroSample, p: float, t: float, side: Side) -> tuple[PhiValue, float]:
    m, tau = _percentile_setup(sample, p, t)
    shift = t if side is Side.PLUS else -t
    # floor(pn)/n + F_N(x) - 1 written with the tail sum
    value = m / sample.n - mixture_sf(sample, tau + shift)
    valid = value >= 0.0 if side is Side.PLUS else value <= 0.0
    return PhiValue(value, side, valid), tau


def phi_plus(sample: HeteroSample, p: float, t: float) -> PhiValue:
    """``floor(pn)/n + F_N(tau + t) - 1`` with ``tau = F_N^{-1}(1 - p)``."""
    return _phi(sample, p, t, Side.PLUS)[0]


def phi_minus(sample: HeteroSample, p: float, t: float) -> PhiValue:
    """``floor(pn)/n + F_N(tau - t) - 1``; usable while it is nonpositive."""
    return _phi(sample, p, t, Side.MINUS)[0]


def theorem1_upper(sample: HeteroSample, p: float, t: float) -> TailBound:
    """Hoeffding bound on ``P(X^(floor(pn)) >= tau + t)``."""
    phi, tau = _phi(sample, p, t, Side.PLUS)
    raw = math.exp(-2.0 * sample.n * phi.value**2)
    return _make(raw, phi.valid, "phi_plus(t) >= 0", radius=float(t), threshold=tau + t)


def theorem1_lower(sample: HeteroSample, p: float, t: float) -> TailBound:
    """Hoeffding bound on ``P(X^(floor(pn)) <= tau - t)``.

    Requires ``phi_minus(t) <= 0``, the sign under which Hoeffding's lower
    tail inequality applies.
    """
    phi, tau = _phi(sample, p, t, Side.MINUS)
    raw = math.exp(-2.0 * sample.n * phi.value**2)
    return _make(raw, phi.valid, "phi_minus(t) <= 0", radius=float(t), threshold=tau - t)


def _corollary1(sample: HeteroSample, p: float, t: float, upper: bool) -> TailBound:
    _, tau = _percentile_setup(sample, p, t)
    n = sample.n
    smin = density_min_sum(sample, p, t)
    ip = parity_flag(n, p)
    ok = t * smin >= 2 * ip
    if upper:
        raw = math.exp(-(smin**2) * 2.0 * t * t / (n * (ip + 1) ** 2))
        threshold = tau + t
    else:
        raw = math.exp(-(smin**2) * 2.0 * t * t / n)
        threshold = tau - t
    desc = f"t * sum_k s_k >= 2 I_p (I_p={ip})"
    return _make(raw, ok, desc, radius=float(t), threshold=threshold)


def corollary1_upper(sample: HeteroSample, p: float, t: float) -> TailBound:
    """Density-floor bound on ``P(X^(floor(pn)) >= tau + t)``."""
    return _corollary1(sample, p, t, upper=True)


def corollary1_lower(sample: HeteroSample, p: float, t: float) -> TailBound:
    """Density-floor bound on ``P(X^(floor(pn)) <= tau - t)``."""
    return _corollary1(sample, p, t, upper=False)


def theorem2_median_bound(
    sample: HeteroSample, t: float, min_density: float | None = None
) -> TailBound:
    """Bound on ``P(|M| >= t)`` for a scale-family sample.

    The density minimum over ``|u| <= t`` and all components is taken at
    ``u = t`` and the smallest scale.  ``min_density`` substitutes a known
    lower bound on that minimum (e.g. ``NORMAL_DENSITY_FLOOR`` when
    ``t <= min sigma / 2``); the result stays valid only if it truly is one.
    """
    base = sample.common_base
    if base is None:
        raise DomainError("median bound needs all laws to share one base law")
    if not base.symmetric or base.cdf(0.0) != 0.5:
        raise DomainError(f"{base.value} is not centred at zero")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    n = sample.n
    if n < 2:
        raise DomainError("the median statistic needs n >= 2")
    h = harmonic_sum(sample.sigmas)
    if min_density is None:
        z = t / sample.sigmas
        d = float(np.minimum(base.pdf(z), base.pdf(-z)).min())
    else:
        d = float(min_density)
    if n % 2 == 0:
        raw = 2.0 * math.exp(-(h**2) * 2.0 * t * t / n * d * d)
        ok, desc = True, "n even"
    else:
        raw = 2.0 * math.exp(-(h**2) * t * t / (2.0 * n) * d * d)
        ok, desc = t * d * h >= 2.0, "n odd: t * min d * sum 1/sigma >= 2"
    return _make(raw, ok, desc, radius=float(t), threshold=float(t))


def median_radius(sigmas: Sequence[float], t: float, constant: float) -> RadiusBound:
    """Radius form ``constant * sqrt(n t) / sum(1/sigma)`` of the median bound.

    Holds with ``P(|M| >= radius) <= 2 exp(-2t)`` for even ``n`` and
    ``2 exp(-t/2)`` for odd ``n`` (which additionally needs ``t n >= 4``),
    provided the radius does not exceed half the smallest scale.
    """
    s = _check_sigmas(sigmas)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    n = s.size
    h = math.fsum(1.0 / s)
    radius = constant * math.sqrt(n * t) / h
    conservative = constant * math.sqrt(t / n) * float(s.max())
    ok = radius <= 0.5 * float(s.min())
    desc = "radius <= min sigma / 2"
    if n % 2 == 0:
        raw = 2.0 * math.exp(-2.0 * t)
    else:
        raw = 2.0 * math.exp(-t / 2.0)
        ok = ok and t * n >= 4
        desc += " and t n >= 4"
    prob = min(1.0, raw) if ok else 1.0
    return RadiusBound(
        prob_bound=prob,
        condition_ok=ok,
        condition_desc=desc,
        radius=radius,
        threshold=radius,
        raw_bound=raw,
        conservative_radius=conservative,
    )


def normal_median_radius(sigmas: Sequence[float], t: float) -> RadiusBound:
    return median_radius(sigmas, t, NORMAL_RADIUS_CONSTANT)


def cauchy_median_radius(sigmas: Sequence[float], t: float) -> RadiusBound:
    return median_radius(sigmas, t, CAUCHY_RADIUS_CONSTANT)


def laplace_median_radius(sigmas: Sequence[float], t: float) -> RadiusBound:
    return median_radius(sigmas, t, LAPLACE_RADIUS_CONSTANT)


def _percentile_side(sample, sigmas, level, p_order, t, upper):
    n = sample.n
    q = mixture_quantile(sample, level).x
    weight = math.fsum(np.exp(-(q**2) / sigmas**2) / sigmas)
    dev = math.sqrt(8.0 * t * n * math.pi) * math.exp(0.25) / weight
    m = rank_index(p_order, n)
    ok = t >= 1.0 / n and dev <= 0.5 * float(sigmas.min()) and m >= 1
    desc = "t >= 1/n and deviation <= min sigma / 2 and floor(p n) >= 1"
    threshold = q + dev if upper else q - dev
    return _make(2.0 * math.exp(-2.0 * t), ok, desc, radius=dev, threshold=threshold)


def normal_percentile_bound(sigmas: Sequence[float], tau: float, t: float) -> PercentileBounds:
    """Deviation bounds for normal percentiles ``tau`` away from the median.

    ``upper`` concerns ``X^(floor((1/2 - tau) n))`` exceeding
    ``F_N^{-1}(1/2 + tau)`` by the deviation; ``lower`` concerns
    ``X^(floor((1/2 + tau) n))`` falling below ``F_N^{-1}(1/2 - tau)``.
    Both hold with probability bound ``2 exp(-2t)``.
    """
    s = _check_sigmas(sigmas)
    tau = float(tau)
    if not 0.0 <= tau <= 0.25:
        raise DomainError(f"tau must lie in [0, 0.25], got {tau}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    sample = HeteroSample.of(BaseLaw.NORMAL, s)
    upper_p, lower_p = 0.5 - tau, 0.5 + tau
    upper = _percentile_side(sample, s, 0.5 + tau, upper_p, t, upper=True)
    lower = _percentile_side(sample, s, 0.5 - tau, lower_p, t, upper=False)
    return PercentileBounds(upper=upper, lower=lower, upper_p=upper_p, lower_p=lower_p)
