"""Seeded, order-independent Monte Carlo for heterogeneous samples.

Uniform variates come from a counter-based generator: draw ``j`` of
replicate ``r`` is a pure function of ``(seed, r, j)`` built from the
SplitMix64 finalizer.  Replicates are processed in fixed-size chunks whose
boundaries depend only on the sample size, so fanning chunks out to any
number of threads reproduces the serial result bit for bit.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .bounds import corollary1_upper, theorem1_upper
from .distributions import BaseLaw, DomainError, HeteroSample
from .exact import order_stat_upper_tail, rank_index
from .mixture import mixture_quantile

__all__ = [
    "MedianAbs",
    "OrderStatTail",
    "MedianTail",
    "McConfig",
    "McEstimate",
    "uniforms",
    "replicate_values",
    "run",
    "sweep_n2",
    "empirical_vs_bound",
    "resolve_workers",
]

log = logging.getLogger(__name__)

_MASK = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_STREAM_GAMMA = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO53 = 2.0**-53
_CHUNK_DRAWS = 1 << 18


def _fmix64(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def _seed_key(seed: int) -> np.uint64:
    with np.errstate(over="ignore"):
        return _fmix64(np.array([seed & _MASK], dtype=np.uint64) + _GAMMA)[0]


def uniforms(seed: int, start: int, count: int, n: int) -> np.ndarray:
    """Uniform(0, 1) draws for replicates ``start .. start+count-1``, shape ``(count, n)``.

    Values are ``(k + 1/2) 2^-53`` for 53-bit integers ``k``, so 0 and 1
    never occur.
    """
    key = _seed_key(seed)
    reps = np.arange(start, start + count, dtype=np.uint64)
    draws = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        stream = _fmix64(key ^ ((reps + np.uint64(1)) * _STREAM_GAMMA))
        z = _fmix64(stream[:, None] + draws[None, :] * _GAMMA)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO53


@dataclass(frozen=True)
class MedianAbs:
    """``|M|`` per replicate."""


@dataclass(frozen=True)
class OrderStatTail:
    """Indicator of ``X^(floor(pn)) >= t``."""

    p: float
    t: float


@dataclass(frozen=True)
class MedianTail:
    """Indicator of ``|M| >= t``."""

    t: float


Statistic = Union[MedianAbs, OrderStatTail, MedianTail]


@dataclass(frozen=True)
class McConfig:
    """One simulation.

    ``median`` is ``"rank"`` for ``M = X^(floor(n/2))`` counted from the
    top, or ``"conventional"`` for the middle element (mean of the two
    middle elements when ``n`` is even).
    """

    sample: HeteroSample
    replicates: int
    seed: int
    statistic: Statistic = MedianAbs()
    median: str = "rank"

    def validate(self) -> None:
        if not isinstance(self.sample, HeteroSample):
            raise DomainError("config needs a HeteroSample")
        if not (isinstance(self.replicates, (int, np.integer)) and self.replicates >= 1):
            raise DomainError(f"replicates must be a positive integer, got {self.replicates!r}")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed <= _MASK):
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.median not in ("rank", "conventional"):
            raise DomainError(f"median must be 'rank' or 'conventional', got {self.median!r}")
        st = self.statistic
        n = self.sample.n
        if isinstance(st, OrderStatTail):
            if not 0.0 < float(st.p) <= 1.0 or rank_index(st.p, n) < 1:
                raise DomainError(f"order statistic needs 0 < p <= 1 and p n >= 1, got p={st.p}")
            if not math.isfinite(st.t):
                raise DomainError("t must be finite")
        elif isinstance(st, MedianTail):
            if not st.t > 0 or not math.isfinite(st.t):
                raise DomainError(f"t must be positive, got {st.t}")
        elif not isinstance(st, MedianAbs):
            raise DomainError(f"unknown statistic {st!r}")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    replicates: int
    seed: int
    warning: str | None = None


def _median(x: np.ndarray, convention: str) -> np.ndarray:
    n = x.shape[1]
    if convention == "conventional":
        return np.median(x, axis=1)
    m = max(n // 2, 1)  # a lone observation is its own median
    k = n - m  # ascending position of the m-th largest
    return np.partition(x, k, axis=1)[:, k]


def _statistic(x: np.ndarray, config: McConfig) -> np.ndarray:
    st = config.statistic
    if isinstance(st, MedianAbs):
        return np.abs(_median(x, config.median))
    if isinstance(st, MedianTail):
        return (np.abs(_median(x, config.median)) >= st.t).astype(float)
    m = rank_index(st.p, x.shape[1])
    return ((x >= st.t).sum(axis=1) >= m).astype(float)


def _chunk_size(n: int) -> int:
    return max(1, _CHUNK_DRAWS // max(n, 1))


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else ``HETQUANT_THREADS``, else CPU count."""
    if workers is None:
        env = os.environ.get("HETQUANT_THREADS", "").strip()
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise DomainError(f"HETQUANT_THREADS must be an integer, got {env!r}") from None
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise DomainError(f"worker count must be positive, got {workers}")
    return workers


def replicate_values(config: McConfig, workers: int | None = None) -> np.ndarray:
    """Per-replicate statistic values in replicate order."""
    config.validate()
    n = config.sample.n
    size = _chunk_size(n)
    starts = range(0, config.replicates, size)

    def one(start: int) -> np.ndarray:
        count = min(size, config.replicates - start)
        x = config.sample.transform(uniforms(config.seed, start, count, n))
        return _statistic(x, config)

    nworkers = min(resolve_workers(workers), len(starts))
    if nworkers <= 1:
        parts = [one(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            parts = list(pool.map(one, starts))
    return np.concatenate(parts)


def _summarize(values: np.ndarray, config: McConfig) -> McEstimate:
    r = values.size
    mean = math.fsum(values) / r
    if r == 1:
        msg = "single replicate: std_error undefined, reported as 0"
        log.warning(msg)
        return McEstimate(mean, 0.0, 1, config.seed, warning=msg)
    var = math.fsum((values - mean) ** 2) / (r - 1)
    return McEstimate(mean, math.sqrt(var / r), r, config.seed)


def run(config: McConfig, workers: int | None = None) -> McEstimate:
    """Mean and standard error of the configured statistic."""
    return _summarize(replicate_values(config, workers), config)


def two_group_sample(n1: int, sigma1: float, n2: int, sigma2: float, base: BaseLaw = BaseLaw.NORMAL) -> HeteroSample:
    if n1 < 1 or n2 < 0:
        raise DomainError(f"need n1 >= 1 and n2 >= 0, got n1={n1}, n2={n2}")
    return HeteroSample.of(base, [sigma1] * n1 + [sigma2] * n2)


def sweep_n2(
    n1: int,
    sigma1: float,
    sigma2: float,
    n2_range: Iterable[int],
    replicates: int,
    seed: int,
    *,
    median: str = "rank",
    workers: int | None = None,
) -> list[tuple[int, McEstimate]]:
    """``E|M|`` of ``n1`` draws at scale ``sigma1`` pooled with ``n2`` at ``sigma2``.

    All rows share the seed, so the first ``n1`` columns of every replicate
    are common across rows.
    """
    n2s = list(n2_range)
    if not n2s:
        raise DomainError("n2 range is empty")
    if not (sigma1 > 0 and sigma2 > 0):
        raise DomainError("scales must be positive")
    rows = []
    for n2 in n2s:
        sample = two_group_sample(n1, sigma1, n2, sigma2)
        config = McConfig(sample, replicates, seed, MedianAbs(), median)
        rows.append((n2, run(config, workers)))
    return rows


@dataclass(frozen=True)
class ComparisonRow:
    t: float
    threshold: float
    exact: float
    mc: float
    mc_se: float
    theorem1: float
    corollary1: float
    t1_ok: bool
    c1_ok: bool


def empirical_vs_bound(
    sample: HeteroSample,
    p: float,
    t_grid: Sequence[float],
    replicates: int,
    seed: int,
    *,
    workers: int | None = None,
) -> list[ComparisonRow]:
    """Tail of ``X^(floor(pn))`` past ``F_N^{-1}(1-p) + t``: exact, simulated, and bounded.

    Grid points with ``t <= 0`` get vacuous bound columns.
    """
    grid = list(t_grid)
    if not grid:
        raise DomainError("t grid is empty")
    tau = mixture_quantile(sample, 1.0 - float(p)).x
    rows = []
    for t in grid:
        threshold = tau + t
        exact = order_stat_upper_tail(sample, p, threshold).prob
        est = run(McConfig(sample, replicates, seed, OrderStatTail(p, threshold)), workers)
        if t > 0:
            t1, c1 = theorem1_upper(sample, p, t), corollary1_upper(sample, p, t)
            bounds = (t1.prob_bound, c1.prob_bound, t1.condition_ok, c1.condition_ok)
        else:
            # the theorems speak only about t > 0
            bounds = (1.0, 1.0, False, False)
        rows.append(ComparisonRow(t, threshold, exact, est.mean, est.std_error, *bounds))
    return rows
